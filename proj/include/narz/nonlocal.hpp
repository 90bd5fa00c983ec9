#pragma once

#include <span>
#include <vector>

#include "narz/grid.hpp"
#include "narz/kernel.hpp"

namespace narz {

/// Look-ahead mass, slowdown factor and spatial derivative, one value per cell.
struct NonlocalFields {
  std::vector<double> rho_tilde;      ///< integral of w(z) rho(x+z) dz
  std::vector<double> slowdown;       ///< exp(-rho_tilde)
  std::vector<double> d_rho_tilde_dx;
};

/// Discrete look-ahead fields for a density profile on a uniform grid.
///
/// Uniform kernel: trapezoidal suffix accumulation, O(N), derivative by the
/// exact identity -rho. Other kernels: windowed trapezoid, O(N*K), derivative
/// by central differences. For kernels with unbounded support the density
/// must have (numerically) vacated the right boundary; otherwise the domain
/// is too small and TruncatedSupport is thrown.
NonlocalFields compute_rho_tilde(std::span<const double> rho, const Kernel& kernel,
                                 const Grid& grid);

/// Diagnostic integral of w'(z) rho(x+z) (u(x+z) - u(x)) dz per cell.
/// Identically zero for the uniform kernel (w' == 0 a.e.).
std::vector<double> interaction_integral(std::span<const double> rho, std::span<const double> u,
                                         const Kernel& kernel, const Grid& grid);

/// Trapezoidal mass of a cell-centered profile.
double trapezoid_mass(std::span<const double> rho, double dx);

}  // namespace narz
