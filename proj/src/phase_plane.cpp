#include "narz/phase_plane.hpp"

#include <algorithm>
#include <cmath>

#include "narz/errors.hpp"
#include "narz/ode.hpp"

namespace narz {

double mediant_lower_bound(double A0, double A1, double B0, double B1) {
  if (!(B0 > 0.0) || !(B1 > 0.0))
    throw InvalidParameter("mediant_lower_bound: denominators must be positive");
  return std::min(A0 / B0, A1 / B1);
}

std::pair<double, double> coupled_rhs(double rho, double d, double F, double G, double slowdown,
                                      const FluxModel& model) {
  const double f = model.f(rho);
  const double fp = model.fprime(rho);
  const double fpp = model.fsecond(rho);
  const double rho_dot = -slowdown * rho * f - rho * rho * F;
  const double d_dot = -slowdown * (fpp * d * d + (2.0 * rho * fp + f) * d + rho * rho * f) -
                       3.0 * rho * d * F - rho * rho * rho * G;
  return {rho_dot, d_dot};
}

namespace {

struct Interp {
  const Grid* grid;

  double at(const std::vector<double>& q, double x) const {
    const double dx = grid->dx();
    double pos = (x - grid->x(0)) / dx;
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(pos));
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(q.size()) - 2);
    double w = pos - j;
    w = std::clamp(w, 0.0, 1.0);
    return (1.0 - w) * q[j] + w * q[j + 1];
  }

  /// Central-difference gradient of q, sampled at x.
  double grad_at(const std::vector<double>& q, double x) const {
    const double dx = grid->dx();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(q.size());
    double pos = (x - grid->x(0)) / dx;
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(pos));
    j = std::clamp<std::ptrdiff_t>(j, 1, n - 3);
    double w = std::clamp(pos - j, 0.0, 1.0);
    double dj = (q[j + 1] - q[j - 1]) / (2.0 * dx);
    double dj1 = (q[j + 2] - q[j]) / (2.0 * dx);
    return (1.0 - w) * dj + w * dj1;
  }
};

// Time-interpolated field access between two frames.
struct FramePair {
  const TraceFrame* a;
  const TraceFrame* b;
  Interp in;

  double field(const std::vector<double> TraceFrame::* arr, double t, double x) const {
    double va = in.at(a->*arr, x);
    double vb = in.at(b->*arr, x);
    if (b->t == a->t) return va;
    double w = std::clamp((t - a->t) / (b->t - a->t), 0.0, 1.0);
    return (1.0 - w) * va + w * vb;
  }
};

// F = dpsi/rho and G = dF/rho at the cell nearest x, with the vacuum rule.
void sample_FG(const TraceFrame& fr, const Grid& grid, double x, double& F, double& G) {
  const double dx = grid.dx();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(fr.rho.size());
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::llround((x - grid.x(0)) / dx));
  j = std::clamp<std::ptrdiff_t>(j, 2, n - 3);

  auto F_at = [&](std::ptrdiff_t i) -> double {
    return (fr.psi[i + 1] - fr.psi[i - 1]) / (2.0 * dx) / fr.rho[i];
  };
  const double vac = 0.05;
  if (fr.rho[j - 1] > vac && fr.rho[j] > vac && fr.rho[j + 1] > vac) {
    F = F_at(j);
    G = (F_at(j + 1) - F_at(j - 1)) / (2.0 * dx) / fr.rho[j];
  }
  // else: keep the caller's previous values
}

}  // namespace

std::vector<CharacteristicTrace> trace_characteristics(std::span<const double> seeds,
                                                       const std::vector<TraceFrame>& frames,
                                                       const Grid& grid, const FluxModel& model) {
  if (frames.size() < 2)
    throw InvalidParameter("trace_characteristics: need at least two frames");

  const double x_lo = grid.x_left + 2.0 * grid.dx();
  const double x_hi = grid.x_right - 2.0 * grid.dx();
  Interp in{&grid};

  std::vector<CharacteristicTrace> traces;
  traces.reserve(seeds.size());

  for (double seed : seeds) {
    CharacteristicTrace tr;
    tr.seed = seed;
    tr.termination = "completed";
    if (seed < x_lo || seed > x_hi) {
      tr.termination = "left-domain";
      traces.push_back(std::move(tr));
      continue;
    }

    double X = seed;
    double F = 0.0, G = 0.0;
    sample_FG(frames[0], grid, X, F, G);
    double rho_ode = in.at(frames[0].rho, X);
    double d_ode = in.grad_at(frames[0].rho, X);
    double s0 = in.at(frames[0].slowdown, X);
    tr.samples.push_back({frames[0].t, X, rho_ode, d_ode, F, G, -std::log(s0), s0});

    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
      const TraceFrame& fa = frames[k];
      const TraceFrame& fb = frames[k + 1];
      FramePair fp{&fa, &fb, in};
      const double dt = fb.t - fa.t;

      // Joint RK4 on (X, rho, d); coefficients sampled at the stage points.
      auto rhs = [&](double t, double x, double r, double d, double* out) {
        double u = fp.field(&TraceFrame::u, t, x);
        double rho_f = fp.field(&TraceFrame::rho, t, x);
        double s = fp.field(&TraceFrame::slowdown, t, x);
        out[0] = u + rho_f * model.Uprime(rho_f) * s;
        auto [rd, dd] = coupled_rhs(r, d, F, G, s, model);
        out[1] = rd;
        out[2] = dd;
      };
      double k1[3], k2[3], k3[3], k4[3];
      rhs(fa.t, X, rho_ode, d_ode, k1);
      rhs(fa.t + 0.5 * dt, X + 0.5 * dt * k1[0], rho_ode + 0.5 * dt * k1[1],
          d_ode + 0.5 * dt * k1[2], k2);
      rhs(fa.t + 0.5 * dt, X + 0.5 * dt * k2[0], rho_ode + 0.5 * dt * k2[1],
          d_ode + 0.5 * dt * k2[2], k3);
      rhs(fb.t, X + dt * k3[0], rho_ode + dt * k3[1], d_ode + dt * k3[2], k4);
      X += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      rho_ode += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      d_ode += dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);

      if (X < x_lo || X > x_hi) {
        tr.termination = "left-domain";
        break;
      }

      sample_FG(fb, grid, X, F, G);
      TraceSample s;
      s.t = fb.t;
      s.X = X;
      s.rho = in.at(fb.rho, X);
      s.d = in.grad_at(fb.rho, X);
      s.F = F;
      s.G = G;
      s.slowdown = in.at(fb.slowdown, X);
      s.rho_tilde = -std::log(s.slowdown);
      tr.samples.push_back(s);

      tr.max_rho_discrepancy = std::max(tr.max_rho_discrepancy, std::fabs(rho_ode - s.rho));
      tr.max_d_discrepancy = std::max(tr.max_d_discrepancy, std::fabs(d_ode - s.d));
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

double FirstOrderTrajectory::eval(double rho_query) const {
  // rho is stored descending.
  if (rho.empty()) return 0.0;
  if (rho_query >= rho.front()) return d.front();
  if (rho_query <= rho.back()) return d.back();
  std::size_t lo = 0, hi = rho.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (rho[mid] >= rho_query ? lo : hi) = mid;
  }
  const double h = rho[hi] - rho[lo];
  const double s = (rho_query - rho[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * d[lo] + (s3 - 2 * s2 + s) * h * slope[lo] +
         (-2 * s3 + 3 * s2) * d[hi] + (s3 - s2) * h * slope[hi];
}

FirstOrderTrajectory integrate_first_order_trajectory(double rho0, double d0,
                                                      const FluxModel& model,
                                                      const TrajectoryOpts& opts) {
  if (!(rho0 > 0.0 && rho0 <= model.rho_c()))
    throw InvalidParameter("trajectory: rho0 must lie in (0, rho_c]");

  ode::Options oopts;
  oopts.rtol = opts.rtol;
  oopts.atol = 1e-12;
  oopts.h_min = 1e-15;
  const double cap = opts.cap;
  oopts.stop_event = [cap](double, std::span<const double> y) {
    return std::fabs(y[0]) > cap;
  };

  auto rhs = [&model](double r, std::span<const double> y, std::span<double> dy) {
    dy[0] = sigma_rhs(model, r, y[0]);
  };

  FirstOrderTrajectory out;
  try {
    ode::Solution sol = ode::integrate(rhs, rho0, opts.delta0, std::span(&d0, 1), oopts);
    for (const auto& k : sol.knots) {
      out.rho.push_back(k.t);
      out.d.push_back(k.y[0]);
      out.slope.push_back(k.f[0]);
    }
    if (sol.event_hit) {
      out.upward_blowup = sol.event_y[0] > 0.0;
      out.rho_stop = sol.event_t;
    } else {
      out.rho_stop = sol.t_end();
    }
  } catch (const OdeFailure&) {
    // Step underflow right at a vertical asymptote: classify by the last value.
    if (!out.rho.empty() && out.d.back() > 0.5 * cap) out.upward_blowup = true;
    throw;
  }
  return out;
}

ComparisonReport verify_comparison(const CharacteristicTrace& trace, const ThresholdCurve& curve,
                                   double tol) {
  ComparisonReport r;
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& s : trace.samples) {
    double bound = curve.eval(s.rho);
    double viol = s.d - bound;  // +inf if the curve is -inf there
    r.max_violation = std::max(r.max_violation, viol);
    ++r.checked;
  }
  if (r.checked == 0) r.max_violation = 0.0;
  r.pass = r.max_violation <= tol;
  return r;
}

}  // namespace narz
