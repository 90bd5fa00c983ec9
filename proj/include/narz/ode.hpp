#pragma once

#include <functional>
#include <span>
#include <vector>

namespace narz::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;
using Event = std::function<bool(double t, std::span<const double> y)>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  ///< 0: choose from the interval
  double h_min = 1e-13;
  std::size_t max_steps = 500000;
  Event stop_event;  ///< integration halts when this first becomes true
};

/// Accepted step endpoint with its derivative, for dense cubic-Hermite output.
struct Knot {
  double t;
  std::vector<double> y;
  std::vector<double> f;
};

struct Solution {
  std::vector<Knot> knots;
  bool event_hit = false;
  double event_t = 0.0;
  std::vector<double> event_y;

  double t_end() const { return knots.back().t; }
  const std::vector<double>& y_end() const { return knots.back().y; }

  /// Cubic Hermite evaluation between accepted steps.
  void eval(double t, std::span<double> y) const;
  double eval1(double t) const;  ///< first component
};

/// Dormand-Prince 5(4) with PI-free standard step control. Works in either
/// time direction (t1 < t0 integrates backward). Throws OdeFailure on
/// step-size underflow.
Solution integrate(const Rhs& rhs, double t0, double t1, std::span<const double> y0,
                   const Options& opts = {});

}  // namespace narz::ode
