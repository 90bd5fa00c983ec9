#pragma once

#include <vector>

#include "narz/errors.hpp"

namespace narz {

/// Uniform 1-d grid of cell centers on [x_left, x_right].
struct Grid {
  double x_left = 0.0;
  double x_right = 1.0;
  int n = 16;

  Grid() = default;
  Grid(double xl, double xr, int cells) : x_left(xl), x_right(xr), n(cells) {
    if (n < 16) throw InvalidParameter("Grid: need at least 16 cells");
    if (!(x_right > x_left)) throw InvalidParameter("Grid: x_right must exceed x_left");
  }

  double dx() const { return (x_right - x_left) / n; }

  /// Center of cell i.
  double x(int i) const { return x_left + (i + 0.5) * dx(); }

  std::vector<double> centers() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
  }
};

}  // namespace narz
