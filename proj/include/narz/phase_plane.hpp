#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "narz/flux.hpp"
#include "narz/solver.hpp"
#include "narz/thresholds.hpp"

namespace narz {

/// One recorded point along a characteristic path.
struct TraceSample {
  double t = 0.0;
  double X = 0.0;
  double rho = 0.0;
  double d = 0.0;  ///< field-sampled density gradient at X
  double F = 0.0;
  double G = 0.0;
  double rho_tilde = 0.0;
  double slowdown = 1.0;
};

struct CharacteristicTrace {
  double seed = 0.0;
  std::vector<TraceSample> samples;
  std::string termination;  ///< "completed" | "left-domain"
  /// Gap between the coupled-ODE propagation of (rho, d) and the field
  /// samples; shrinks under space-time refinement.
  double max_rho_discrepancy = 0.0;
  double max_d_discrepancy = 0.0;
};

/// min(A0/B0, A1/B1); a guaranteed lower bound for (A0+A1)/(B0+B1).
double mediant_lower_bound(double A0, double A1, double B0, double B1);

/// Right-hand side of the coupled (rho, d) dynamics along a characteristic.
std::pair<double, double> coupled_rhs(double rho, double d, double F, double G, double slowdown,
                                      const FluxModel& model);

/// Integrate characteristic paths through the stored per-step frames of a run
/// (speed u + rho U'(rho) slowdown, RK4 locked to the solver step, linear
/// interpolation in space). Fields F and G are sampled with the vacuum rule:
/// below rho = 0.05 the last reliable value is kept. The coupled ODE is
/// co-integrated with the sampled coefficients and its gap reported.
std::vector<CharacteristicTrace> trace_characteristics(std::span<const double> seeds,
                                                       const std::vector<TraceFrame>& frames,
                                                       const Grid& grid, const FluxModel& model);

struct TrajectoryOpts {
  double delta0 = 1e-6;
  double cap = 1e4;
  double rtol = 1e-10;
};

/// First-order phase-plane trajectory d(rho), integrated backward in rho
/// (rho decreases along characteristics). The slowdown factor cancels from
/// the trajectory equation, so this is exact for the first-order nonlocal
/// model as well.
struct FirstOrderTrajectory {
  std::vector<double> rho;    ///< descending
  std::vector<double> d;
  std::vector<double> slope;  ///< d'(rho) at the knots
  bool upward_blowup = false;
  double rho_stop = 0.0;
  double eval(double rho_query) const;  ///< cubic Hermite between knots
};

FirstOrderTrajectory integrate_first_order_trajectory(double rho0, double d0,
                                                      const FluxModel& model,
                                                      const TrajectoryOpts& opts = {});

struct ComparisonReport {
  bool pass = true;
  double max_violation = 0.0;  ///< max over samples of d - curve(rho)
  std::size_t checked = 0;
};

/// Check d(t) <= curve(rho(t)) + tol along a trace.
ComparisonReport verify_comparison(const CharacteristicTrace& trace, const ThresholdCurve& curve,
                                   double tol);

}  // namespace narz
