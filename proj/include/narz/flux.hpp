#pragma once

#include <functional>
#include <string>

namespace narz {

/// Velocity law U(rho) and flux f(rho) = rho*U(rho) with exact derivatives.
///
/// The f-derivatives are always derived from (U, U', U'') by the product rule,
/// so the pair (U, f) cannot drift apart. The built-in family is
/// U(rho) = (1-rho)^J with J >= 1; custom models supply the three callables.
class FluxModel {
 public:
  using Fn = std::function<double(double)>;

  /// U = (1-rho)^J. rho_M defaults to 1 for J == 1 and 0.99 for J > 1
  /// (the inverse velocity law loses smoothness at rho = 1 when J > 1).
  static FluxModel pipes(double J);
  static FluxModel pipes(double J, double rho_M);

  /// Custom model from (U, U', U''); the caller guarantees U(0)=1, U(1)=0,
  /// U' < 0 on (0,1). Structural checks sample these on construction.
  static FluxModel custom(Fn U, Fn Uprime, Fn Usecond, double rho_M = 1.0);

  double U(double rho) const { return u_(rho); }
  double Uprime(double rho) const { return up_(rho); }
  double Usecond(double rho) const { return upp_(rho); }

  double f(double rho) const { return rho * u_(rho); }
  double fprime(double rho) const { return u_(rho) + rho * up_(rho); }
  double fsecond(double rho) const { return 2.0 * up_(rho) + rho * upp_(rho); }

  /// Inflection point of f: 2/(J+1) for the built-in family, located by
  /// bisection on f'' for custom models, 1 if f is concave throughout.
  double rho_c() const { return rho_c_; }
  double rho_M() const { return rho_m_; }

  bool is_pipes() const { return is_pipes_; }
  double J() const { return j_; }

  /// sup|U| + sup|U'| over [0, rho_M]; used by the velocity-gradient monitor.
  double c1_norm() const { return c1_norm_; }

 private:
  FluxModel() = default;
  void validate_and_finish();

  Fn u_, up_, upp_;
  double rho_m_ = 1.0;
  double rho_c_ = 1.0;
  double c1_norm_ = 0.0;
  bool is_pipes_ = false;
  double j_ = 0.0;
};

/// Largest beta in (0,1] with rho*U''(rho)/U'(rho) >= -1 on [0, beta].
/// Exactly 1/J for the built-in family; bisection to 1e-8 otherwise.
double blowup_beta(const FluxModel& model);

}  // namespace narz
