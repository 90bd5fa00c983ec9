#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "narz/flux.hpp"
#include "narz/kernel.hpp"
#include "narz/state.hpp"

namespace narz {

/// Critical-threshold curve in the (rho, d rho/dx) phase plane, tabulated on
/// [0, rho_c]. For the second-order curve the value may dive to -infinity at
/// rho_star < rho_c; samples then stop at the dive and eval() returns -inf
/// beyond it.
struct ThresholdCurve {
  enum class Kind { Sigma, Eta };

  Kind kind = Kind::Sigma;
  double C_eta = 0.0;
  double rho_c = 1.0;
  double slope_at_zero = 0.0;
  std::vector<double> rho;
  std::vector<double> value;
  std::vector<double> tangent;       ///< interpolation tangents, set by the builders
  std::vector<std::uint8_t> branch;  ///< 0: quadratic branch, 1: 3y/rho branch
  std::optional<double> rho_star;

  /// Fill `tangent` from the samples (shape-preserving cubic).
  void finalize();

  /// Monotone-cubic (shape-preserving) interpolation of the samples;
  /// -infinity for rho >= rho_star.
  double eval(double rho_query) const;
};

struct ThresholdOpts {
  double delta0 = 1e-6;  ///< Taylor start abscissa for the singular origin
  double cap = 1e6;      ///< |value| at which a downward dive is declared
  double rtol = 1e-10;
  int samples = 2048;
  bool self_check = true;  ///< re-solve with delta0/2 and compare mid-curve
};

/// First-order threshold for the built-in family: sigma = rho(1-rho)/J.
ThresholdCurve sigma_closed_form(const FluxModel& model);

/// Right-hand side of the first-order threshold ODE.
double sigma_rhs(const FluxModel& model, double rho, double s);

/// Right-hand side of the second-order threshold ODE:
/// min of the quadratic branch shifted by -C_eta rho^2/f and 3 y / rho.
double eta_rhs(const FluxModel& model, double rho, double y, double C_eta);

/// Integrate the threshold ODE from the Taylor start at delta0 up to rho_c
/// with an adaptive embedded RK pair; dense tabulation, dive detection.
ThresholdCurve solve_threshold_ode(ThresholdCurve::Kind kind, const FluxModel& model,
                                   double C_eta, const ThresholdOpts& opts = {});

/// C_eta = sup|G0| * exp(m * w(0)). Requires the a5 diagnostics to pass.
double eta_constant_from_data(const AssumptionReport& report, const Kernel& kernel);

struct Classification {
  std::vector<std::uint8_t> supercritical;  ///< per cell
  bool all_subcritical = true;
  int first_supercritical = -1;
};

/// Per-cell subcritical test of initial data against a threshold curve:
/// a cell is supercritical when rho0 exceeds rho_c, or sits at/past rho_star,
/// or its discrete slope exceeds the curve. Vacuum cells are subcritical.
Classification classify_initial_data(const TrafficState& state, const ThresholdCurve& curve,
                                     double slope_tol = 1e-8, double eps_vac = 1e-10);

}  // namespace narz
