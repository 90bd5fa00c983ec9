#include "narz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "narz/errors.hpp"
#include "narz/simd.hpp"

namespace narz {

bool variant_uses_psi(ModelVariant v) {
  return v == ModelVariant::LocalARZ || v == ModelVariant::NonlocalARZ;
}

bool variant_uses_nonlocal(ModelVariant v) {
  return v == ModelVariant::FirstOrderNonlocal || v == ModelVariant::NonlocalARZ;
}

const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::LWR: return "lwr";
    case ModelVariant::FirstOrderNonlocal: return "first-order-nonlocal";
    case ModelVariant::LocalARZ: return "local-arz";
    case ModelVariant::NonlocalARZ: return "nonlocal-arz";
  }
  return "?";
}

ModelVariant variant_from_name(const std::string& name) {
  if (name == "lwr") return ModelVariant::LWR;
  if (name == "first-order-nonlocal") return ModelVariant::FirstOrderNonlocal;
  if (name == "local-arz") return ModelVariant::LocalARZ;
  if (name == "nonlocal-arz") return ModelVariant::NonlocalARZ;
  throw InvalidParameter("unknown model variant: " + name);
}

const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::GradientBlowup: return "gradient-blowup";
    case RunOutcome::InvariantBreach: return "invariant-breach";
    case RunOutcome::TruncatedSupport: return "truncated-support";
  }
  return "?";
}

namespace {

constexpr int kGhost = 2;

NonlocalFields trivial_nonlocal(std::size_t n) {
  NonlocalFields f;
  f.rho_tilde.assign(n, 0.0);
  f.slowdown.assign(n, 1.0);
  f.d_rho_tilde_dx.assign(n, 0.0);
  return f;
}

NonlocalFields nonlocal_for(std::span<const double> rho, ModelVariant variant,
                            const Kernel& kernel, const Grid& grid) {
  if (!variant_uses_nonlocal(variant)) return trivial_nonlocal(rho.size());
  return compute_rho_tilde(rho, kernel, grid);
}

void check_finite(std::span<const double> q, const char* what, double t) {
  for (double v : q)
    if (!std::isfinite(v))
      throw NumericalFailure(std::string("non-finite ") + what + " at t = " + std::to_string(t));
}

// Semi-discrete right-hand side for (rho, psi) given the stage fields.
struct StageRhs {
  std::vector<double> L_rho;
  std::vector<double> L_psi;
  std::vector<double> u;         // stage velocity on the interior
  std::vector<double> slowdown;  // stage slowdown on the interior
};

StageRhs stage_rhs(std::span<const double> rho, std::span<const double> psi, ModelVariant variant,
                   const Kernel& kernel, const FluxModel& model, const Grid& grid,
                   const SolverConfig& cfg, double t_for_errors, const char* stage) {
  const std::size_t n = rho.size();
  const double dx = grid.dx();
  const std::size_t np = n + 2 * kGhost;

  NonlocalFields nl = nonlocal_for(rho, variant, kernel, grid);

  StageRhs out;
  out.slowdown = nl.slowdown;
  out.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.u[i] = psi[i] + model.U(rho[i]) * nl.slowdown[i];
  check_finite(out.u, (std::string("velocity (") + stage + ")").c_str(), t_for_errors);

  // Padded fields: vacuum density ghosts, constant-extrapolated u and psi.
  std::vector<double> rho_p(np, 0.0), u_p(np), psi_p(np), lam_p(np);
  std::copy(rho.begin(), rho.end(), rho_p.begin() + kGhost);
  std::copy(out.u.begin(), out.u.end(), u_p.begin() + kGhost);
  std::copy(psi.begin(), psi.end(), psi_p.begin() + kGhost);
  for (int g = 0; g < kGhost; ++g) {
    u_p[g] = out.u.front();
    u_p[np - 1 - g] = out.u.back();
    psi_p[g] = psi.front();
    psi_p[np - 1 - g] = psi.back();
  }
  for (std::size_t i = 0; i < n; ++i)
    lam_p[kGhost + i] = out.u[i] + rho[i] * model.Uprime(rho[i]) * nl.slowdown[i];
  for (int g = 0; g < kGhost; ++g) {
    lam_p[g] = lam_p[kGhost];
    lam_p[np - 1 - g] = lam_p[np - 1 - kGhost];
  }

  std::vector<double> s_rho(np, 0.0), s_u(np, 0.0);
  if (cfg.spatial_order >= 2) {
    if (cfg.limiter) {
      simd::minmod_slopes(rho_p.data(), s_rho.data(), np);
      simd::minmod_slopes(u_p.data(), s_u.data(), np);
    } else {
      for (std::size_t i = 1; i + 1 < np; ++i) {
        s_rho[i] = 0.5 * (rho_p[i + 1] - rho_p[i - 1]);
        s_u[i] = 0.5 * (u_p[i + 1] - u_p[i - 1]);
      }
    }
  }

  // Interface states and local Lax-Friedrichs flux on rho*u.
  const std::size_t ni = n + 1;
  std::vector<double> rho_l(ni), rho_r(ni), q_l(ni), q_r(ni), speed(ni), flux(ni);
  for (std::size_t j = 0; j < ni; ++j) {
    const std::size_t p = j + kGhost - 1;  // cell left of interface j
    const double rl = rho_p[p] + 0.5 * s_rho[p];
    const double rr = rho_p[p + 1] - 0.5 * s_rho[p + 1];
    const double ul = u_p[p] + 0.5 * s_u[p];
    const double ur = u_p[p + 1] - 0.5 * s_u[p + 1];
    rho_l[j] = rl;
    rho_r[j] = rr;
    q_l[j] = rl * ul;
    q_r[j] = rr * ur;
    speed[j] = std::max(std::fabs(lam_p[p]), std::fabs(lam_p[p + 1]));
  }
  simd::llf_flux(rho_l.data(), rho_r.data(), q_l.data(), q_r.data(), speed.data(), flux.data(),
                 ni);
  out.L_rho.resize(n);
  simd::neg_scaled_diff(flux.data(), 1.0 / dx, out.L_rho.data(), n);

  // Offset transport: upwind-biased reconstructed differences.
  out.L_psi.assign(n, 0.0);
  if (variant_uses_psi(variant)) {
    std::vector<double> s_psi(np, 0.0);
    if (cfg.spatial_order >= 2) simd::minmod_slopes(psi_p.data(), s_psi.data(), np);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p = kGhost + i;
      double dpsi;
      if (out.u[i] >= 0.0)
        dpsi = ((psi_p[p] + 0.5 * s_psi[p]) - (psi_p[p - 1] + 0.5 * s_psi[p - 1])) / dx;
      else
        dpsi = ((psi_p[p + 1] - 0.5 * s_psi[p + 1]) - (psi_p[p] - 0.5 * s_psi[p])) / dx;
      out.L_psi[i] = -out.u[i] * dpsi;
    }
  }
  return out;
}

}  // namespace

double stable_dt(const TrafficState& state, ModelVariant variant, const FluxModel& model,
                 const SolverConfig& config) {
  const std::size_t n = state.rho.size();
  if (variant_uses_nonlocal(variant) && state.nonlocal.slowdown.size() != n)
    throw InvalidParameter("stable_dt: state is missing its look-ahead fields");
  double speed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(state.rho[i]) || !std::isfinite(state.u[i]))
      throw NumericalFailure("stable_dt: non-finite state at t = " + std::to_string(state.t));
    const double s = variant_uses_nonlocal(variant) ? state.nonlocal.slowdown[i] : 1.0;
    const double lam = state.u[i] + state.rho[i] * model.Uprime(state.rho[i]) * s;
    speed = std::max(speed, std::max(std::fabs(state.u[i]), std::fabs(lam)));
  }
  if (speed < 1e-300) return std::numeric_limits<double>::infinity();
  return std::max(config.cfl * state.grid.dx() / speed, 1e-12);
}

TrafficState step(const TrafficState& state, ModelVariant variant, const Kernel& kernel,
                  const FluxModel& model, double dt, const SolverConfig& config) {
  const std::size_t n = state.rho.size();
  const bool with_psi = variant_uses_psi(variant);

  std::vector<double> rho0 = state.rho;
  std::vector<double> psi0 = with_psi ? state.psi : std::vector<double>(n, 0.0);

  // SSP-RK3: u1 = u + dt L(u); u2 = 3/4 u + 1/4 (u1 + dt L(u1));
  //          u{n+1} = 1/3 u + 2/3 (u2 + dt L(u2)).
  StageRhs r0 = stage_rhs(rho0, psi0, variant, kernel, model, state.grid, config, state.t,
                          "stage 1/3");
  std::vector<double> rho1(n), psi1(n);
  simd::axpby(1.0, rho0.data(), dt, r0.L_rho.data(), rho1.data(), n);
  simd::axpby(1.0, psi0.data(), dt, r0.L_psi.data(), psi1.data(), n);

  StageRhs r1 = stage_rhs(rho1, psi1, variant, kernel, model, state.grid, config, state.t,
                          "stage 2/3");
  std::vector<double> rho2(n), psi2(n), tmp(n);
  simd::axpby(1.0, rho1.data(), dt, r1.L_rho.data(), tmp.data(), n);
  simd::axpby(0.75, rho0.data(), 0.25, tmp.data(), rho2.data(), n);
  simd::axpby(1.0, psi1.data(), dt, r1.L_psi.data(), tmp.data(), n);
  simd::axpby(0.75, psi0.data(), 0.25, tmp.data(), psi2.data(), n);

  StageRhs r2 = stage_rhs(rho2, psi2, variant, kernel, model, state.grid, config, state.t,
                          "stage 3/3");
  TrafficState next;
  next.t = state.t + dt;
  next.grid = state.grid;
  next.rho.resize(n);
  next.psi.resize(n);
  simd::axpby(1.0, rho2.data(), dt, r2.L_rho.data(), tmp.data(), n);
  simd::axpby(1.0 / 3.0, rho0.data(), 2.0 / 3.0, tmp.data(), next.rho.data(), n);
  simd::axpby(1.0, psi2.data(), dt, r2.L_psi.data(), tmp.data(), n);
  simd::axpby(1.0 / 3.0, psi0.data(), 2.0 / 3.0, tmp.data(), next.psi.data(), n);

  check_finite(next.rho, "density", next.t);
  check_finite(next.psi, "offset", next.t);

  next.nonlocal = nonlocal_for(next.rho, variant, kernel, state.grid);
  next.u.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    next.u[i] = next.psi[i] + model.U(next.rho[i]) * next.nonlocal.slowdown[i];
  next.mass = trapezoid_mass(next.rho, state.grid.dx());
  return next;
}

Snapshot make_snapshot(const TrafficState& state) {
  Snapshot s;
  s.t = state.t;
  s.rho = state.rho;
  s.u = state.u;
  s.psi = state.psi;
  s.rho_tilde = state.nonlocal.rho_tilde;
  s.d_rho_dx = central_diff(state.rho, state.grid.dx());
  return s;
}

RunResult run(const TrafficState& initial, ModelVariant variant, const Kernel& kernel,
              const FluxModel& model, const SolverConfig& config) {
  if (!(config.cfl > 0.0 && config.cfl <= 0.9))
    throw InvalidParameter("run: cfl must be in (0, 0.9]");
  if (!(config.d_max > 0.0)) throw InvalidParameter("run: d_max must be positive");

  const std::size_t n = initial.rho.size();
  const double dx = initial.grid.dx();
  RunResult res;
  res.final_state = initial;
  TrafficState& state = res.final_state;
  if (!variant_uses_psi(variant)) {
    // Offset frozen at zero: the velocity is the (nonlocal) equilibrium one.
    std::fill(state.psi.begin(), state.psi.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      state.u[i] = model.U(state.rho[i]) * state.nonlocal.slowdown[i];
  }

  RunReport& rep = res.report;
  rep.min_dpsi_dx_over_time = std::numeric_limits<double>::infinity();

  const double mass0 = state.mass;
  const double rho_m = model.rho_M();
  const double c1 = model.c1_norm();
  const double w0 = variant_uses_nonlocal(variant) ? kernel.w0 : 0.0;
  const double mon_tol = 1e-3;

  auto record = [&](const TrafficState& s) {
    StepMonitors m;
    m.t = s.t;
    m.mass = s.mass;
    m.rho_min = *std::min_element(s.rho.begin(), s.rho.end());
    m.rho_max = *std::max_element(s.rho.begin(), s.rho.end());
    m.u_min = *std::min_element(s.u.begin(), s.u.end());
    m.u_max = *std::max_element(s.u.begin(), s.u.end());
    std::vector<double> dpsi = central_diff(s.psi, dx);
    m.min_dpsi_dx = *std::min_element(dpsi.begin(), dpsi.end());
    std::vector<double> drho = central_diff(s.rho, dx);
    m.max_abs_drho_dx = simd::max_abs(drho.data(), drho.size());
    std::vector<double> du = central_diff(s.u, dx);
    const double bound = -(c1 * m.max_abs_drho_dx + w0);
    m.ux_lower_margin = *std::min_element(du.begin(), du.end()) - bound;
    m.sup_F = 0.0;
    if (variant_uses_psi(variant)) {
      for (std::size_t i = 0; i < n; ++i)
        if (s.rho[i] > 0.05) m.sup_F = std::max(m.sup_F, dpsi[i] / s.rho[i]);
    }
    rep.monitors.push_back(m);
    rep.max_drho_dx_over_time = std::max(rep.max_drho_dx_over_time, m.max_abs_drho_dx);
    rep.min_dpsi_dx_over_time = std::min(rep.min_dpsi_dx_over_time, m.min_dpsi_dx);
    rep.max_sup_F_over_time = std::max(rep.max_sup_F_over_time, m.sup_F);
    if (mass0 > 0.0)
      rep.mass_drift_rel = std::max(rep.mass_drift_rel, std::fabs(s.mass - mass0) / mass0);
    return m;
  };

  const int frame_every = std::max(1, config.frame_every);
  auto push_frame = [&](const TrafficState& s, long idx) {
    if (!config.trace_support || idx % frame_every != 0) return;
    res.frames.push_back({s.t, s.rho, s.u, s.nonlocal.slowdown, s.psi});
  };

  StepMonitors mon = record(state);
  res.snapshots.push_back(make_snapshot(state));
  push_frame(state, 0);

  TrafficState prev = state;
  long step_idx = 0;
  while (state.t < config.t_end - 1e-12) {
    double dt = std::min(stable_dt(state, variant, model, config), config.t_end - state.t);
    prev = state;
    try {
      state = step(state, variant, kernel, model, dt, config);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string(e.what()) + " (run aborted at t = " +
                             std::to_string(state.t) + ")");
    } catch (const TruncatedSupport&) {
      rep.outcome = RunOutcome::TruncatedSupport;
      rep.note = "support reached the domain boundary";
      break;
    } catch (const InvariantBreach& e) {
      rep.outcome = RunOutcome::InvariantBreach;
      rep.note = e.what();
      break;
    }
    ++step_idx;

    const double g_prev = mon.max_abs_drho_dx;
    mon = record(state);
    rep.criterion_integral += 0.5 * (g_prev + mon.max_abs_drho_dx) * dt;
    push_frame(state, step_idx);

    if (config.snapshot_every > 0 && step_idx % config.snapshot_every == 0)
      res.snapshots.push_back(make_snapshot(state));

    // Shock detection first: a steepening front legitimately stresses the
    // pointwise tolerances right before it is caught here.
    if (mon.max_abs_drho_dx > config.d_max) {
      rep.outcome = RunOutcome::GradientBlowup;
      rep.t_detect = state.t;
      res.pre_blowup = make_snapshot(prev);
      break;
    }

    if (state.rho.front() > 1e-9 || state.rho.back() > 1e-9) {
      rep.outcome = RunOutcome::TruncatedSupport;
      rep.note = "support reached the domain boundary";
      break;
    }

    const bool breach = mon.rho_min < -1e-6 || mon.rho_max > rho_m + mon_tol ||
                        mon.u_min < -mon_tol || mon.u_max > 1.0 + mon_tol ||
                        mon.min_dpsi_dx < -mon_tol;
    if (breach) ++rep.invariant_breaches;
    const bool hard = mon.rho_min < -1e-5 || mon.rho_max > rho_m + 10.0 * mon_tol ||
                      mon.u_min < -10.0 * mon_tol || mon.u_max > 1.0 + 10.0 * mon_tol ||
                      mon.min_dpsi_dx < -10.0 * mon_tol;
    if (hard) {
      rep.outcome = RunOutcome::InvariantBreach;
      rep.note = "field bounds breached beyond 10x tolerance";
      break;
    }
  }

  rep.t_final = state.t;
  if (res.snapshots.empty() || res.snapshots.back().t != state.t)
    res.snapshots.push_back(make_snapshot(state));
  return res;
}

}  // namespace narz
