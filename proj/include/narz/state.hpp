#pragma once

#include <span>
#include <vector>

#include "narz/flux.hpp"
#include "narz/grid.hpp"
#include "narz/kernel.hpp"
#include "narz/nonlocal.hpp"

namespace narz {

/// One time level of the simulation: density, velocity and velocity offset on
/// the grid, with the look-ahead fields cached. Plain value type; operations
/// return new states.
struct TrafficState {
  double t = 0.0;
  Grid grid;
  std::vector<double> rho;
  std::vector<double> u;
  std::vector<double> psi;
  NonlocalFields nonlocal;
  double mass = 0.0;
};

/// Initial-data diagnostics: F0 = psi0'/rho0 and G0 = F0'/rho0 with their sup
/// norms, plus the monotonicity (a4) and boundedness (a5) flags.
struct AssumptionReport {
  double mass = 0.0;
  bool a4 = true;
  bool a5 = true;
  double sup_F0 = 0.0;
  double sup_G0 = 0.0;
  std::vector<double> F0;
  std::vector<double> G0;
  int a4_violation_cell = -1;
  int a5_violation_cell = -1;
  double eps_vac = 1e-10;
  double eps_bulk = 1e-3;
};

/// Aggregated pass/fail of the initial-data requirements. Failures are data.
struct ValidationSummary {
  bool a1 = true;   ///< finite mass (always true on a grid; recorded)
  bool a2 = true;   ///< 0 <= rho0 <= 1, 0 <= u0 <= 1
  bool a2p = true;  ///< rho0 <= rho_M of the model
  bool a3 = true;   ///< smooth-at-grid-scale proxy on rho0, u0
  bool a4 = true;
  bool a5 = true;
  int a2_violation_cell = -1;
  int a3_violation_cell = -1;
  double mass = 0.0;
  double rho_min = 0.0, rho_max = 0.0, u_min = 0.0, u_max = 0.0;

  bool all_pass() const { return a1 && a2 && a2p && a3 && a4 && a5; }
};

/// Build the t = 0 state from (rho0, u0): computes the look-ahead fields and
/// sets the velocity offset psi0 = u0 - U(rho0) * slowdown.
TrafficState build_initial_state(std::span<const double> rho0, std::span<const double> u0,
                                 const FluxModel& model, const Kernel& kernel, const Grid& grid);

/// F0/G0 diagnostics by second-order central differences.
///
/// Cells with rho0 < eps_vac are vacuum: F0 = G0 = 0 there, and |psi0'| must
/// itself be below eps_vac (offset growth at vacuum violates a5). Cells with
/// rho0 < eps_bulk are excluded from the quotients: dividing central
/// differences by a near-zero density amplifies roundoff past any signal.
AssumptionReport compute_F0_G0(const TrafficState& state, double eps_vac = 1e-10,
                               double eps_bulk = 1e-3);

ValidationSummary validate_assumptions(const TrafficState& state, const AssumptionReport& report,
                                       const FluxModel& model);

/// Second-order difference quotient (central inside, one-sided at the ends).
std::vector<double> central_diff(std::span<const double> q, double dx);

}  // namespace narz
