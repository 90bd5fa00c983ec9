#include "narz/state.hpp"

#include <algorithm>
#include <cmath>

#include "narz/errors.hpp"

namespace narz {

std::vector<double> central_diff(std::span<const double> q, double dx) {
  const std::size_t n = q.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) return d;
  const double i2dx = 1.0 / (2.0 * dx);
  d[0] = (-3.0 * q[0] + 4.0 * q[1] - q[2]) * i2dx;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (q[i + 1] - q[i - 1]) * i2dx;
  d[n - 1] = (3.0 * q[n - 1] - 4.0 * q[n - 2] + q[n - 3]) * i2dx;
  return d;
}

TrafficState build_initial_state(std::span<const double> rho0, std::span<const double> u0,
                                 const FluxModel& model, const Kernel& kernel, const Grid& grid) {
  if (rho0.size() != u0.size() || static_cast<int>(rho0.size()) != grid.n)
    throw InvalidParameter("build_initial_state: field sizes do not match grid");

  TrafficState s;
  s.t = 0.0;
  s.grid = grid;
  s.rho.assign(rho0.begin(), rho0.end());
  s.u.assign(u0.begin(), u0.end());
  s.nonlocal = compute_rho_tilde(s.rho, kernel, grid);
  s.psi.resize(s.rho.size());
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    s.psi[i] = s.u[i] - model.U(s.rho[i]) * s.nonlocal.slowdown[i];
  s.mass = trapezoid_mass(s.rho, grid.dx());
  return s;
}

AssumptionReport compute_F0_G0(const TrafficState& state, double eps_vac, double eps_bulk) {
  const std::size_t n = state.rho.size();
  const double dx = state.grid.dx();
  AssumptionReport r;
  r.mass = state.mass;
  r.eps_vac = eps_vac;
  r.eps_bulk = std::max(eps_bulk, eps_vac);

  const std::vector<double> dpsi = central_diff(state.psi, dx);

  // a4: the offset must be non-decreasing. Tiny negatives are grid roundoff.
  const double a4_tol = 1e-10;
  for (std::size_t i = 0; i < n; ++i) {
    if (dpsi[i] < -a4_tol) {
      r.a4 = false;
      r.a4_violation_cell = static_cast<int>(i);
      break;
    }
  }

  r.F0.assign(n, 0.0);
  r.G0.assign(n, 0.0);
  std::vector<char> bulk(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (state.rho[i] < eps_vac) {
      if (std::fabs(dpsi[i]) >= eps_vac && r.a5) {
        r.a5 = false;
        r.a5_violation_cell = static_cast<int>(i);
      }
    } else if (state.rho[i] >= r.eps_bulk) {
      bulk[i] = 1;
      r.F0[i] = dpsi[i] / state.rho[i];
    }
  }

  const std::vector<double> dF = central_diff(r.F0, dx);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (bulk[i - 1] && bulk[i] && bulk[i + 1]) {
      r.G0[i] = dF[i] / state.rho[i];
      r.sup_G0 = std::max(r.sup_G0, std::fabs(r.G0[i]));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (bulk[i]) r.sup_F0 = std::max(r.sup_F0, std::fabs(r.F0[i]));

  return r;
}

ValidationSummary validate_assumptions(const TrafficState& state, const AssumptionReport& report,
                                       const FluxModel& model) {
  const std::size_t n = state.rho.size();
  ValidationSummary v;
  v.mass = state.mass;
  v.a1 = std::isfinite(state.mass);
  v.a4 = report.a4;
  v.a5 = report.a5;

  v.rho_min = *std::min_element(state.rho.begin(), state.rho.end());
  v.rho_max = *std::max_element(state.rho.begin(), state.rho.end());
  v.u_min = *std::min_element(state.u.begin(), state.u.end());
  v.u_max = *std::max_element(state.u.begin(), state.u.end());

  const double btol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    bool bad = state.rho[i] < -btol || state.rho[i] > 1.0 + btol || state.u[i] < -btol ||
               state.u[i] > 1.0 + btol;
    if (bad) {
      v.a2 = false;
      v.a2_violation_cell = static_cast<int>(i);
      break;
    }
  }
  v.a2p = v.rho_max <= model.rho_M() + btol;

  // a3 proxy: finite fields without grid-scale oscillation. A resolved smooth
  // profile has |second difference| well below |first difference|; a sawtooth
  // has twice it.
  auto smooth_ok = [&](const std::vector<double>& q) -> int {
    double max_d1 = 0.0;
    for (std::size_t i = 1; i < n; ++i) max_d1 = std::max(max_d1, std::fabs(q[i] - q[i - 1]));
    if (max_d1 == 0.0) return -1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!std::isfinite(q[i])) return static_cast<int>(i);
      double d2 = std::fabs(q[i + 1] - 2.0 * q[i] + q[i - 1]);
      if (d2 > 1.0 * max_d1) return static_cast<int>(i);
    }
    return -1;
  };
  int bad_rho = smooth_ok(state.rho);
  int bad_u = smooth_ok(state.u);
  if (bad_rho >= 0 || bad_u >= 0) {
    v.a3 = false;
    v.a3_violation_cell = bad_rho >= 0 ? bad_rho : bad_u;
  }
  return v;
}

}  // namespace narz
