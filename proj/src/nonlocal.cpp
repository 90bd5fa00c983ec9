#include "narz/nonlocal.hpp"

#include <algorithm>
#include <cmath>

#include "narz/errors.hpp"
#include "narz/simd.hpp"

namespace narz {

double trapezoid_mass(std::span<const double> rho, double dx) {
  if (rho.size() < 2) return 0.0;
  double s = 0.5 * (rho.front() + rho.back());
  for (std::size_t i = 1; i + 1 < rho.size(); ++i) s += rho[i];
  return s * dx;
}

namespace {

void check_right_support(std::span<const double> rho) {
  if (!rho.empty() && std::fabs(rho.back()) >= 1e-12)
    throw TruncatedSupport("look-ahead integral: density has not vacated the right boundary");
}

void central_derivative(const std::vector<double>& q, double dx, std::vector<double>& out) {
  const std::size_t n = q.size();
  out.resize(n);
  if (n < 3) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double i2dx = 1.0 / (2.0 * dx);
  out[0] = (-3.0 * q[0] + 4.0 * q[1] - q[2]) * i2dx;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (q[i + 1] - q[i - 1]) * i2dx;
  out[n - 1] = (3.0 * q[n - 1] - 4.0 * q[n - 2] + q[n - 3]) * i2dx;
}

void check_bounds(const NonlocalFields& f, double m, double w0, double dx) {
  const double tol = 1e-8 + 10.0 * dx * dx * std::max(1.0, m * w0);
  const double hi = m * w0 + tol;
  const double lo_slow = std::exp(-m * w0) - tol;
  for (std::size_t i = 0; i < f.rho_tilde.size(); ++i) {
    if (f.rho_tilde[i] < -tol || f.rho_tilde[i] > hi)
      throw InvariantBreach("look-ahead mass outside [0, m*w(0)] beyond tolerance");
    if (f.slowdown[i] < lo_slow || f.slowdown[i] > 1.0 + tol)
      throw InvariantBreach("slowdown outside [exp(-m*w(0)), 1] beyond tolerance");
  }
}

}  // namespace

NonlocalFields compute_rho_tilde(std::span<const double> rho, const Kernel& kernel,
                                 const Grid& grid) {
  const std::size_t n = rho.size();
  if (static_cast<int>(n) != grid.n)
    throw InvalidParameter("compute_rho_tilde: field size does not match grid");
  const double dx = grid.dx();

  NonlocalFields out;
  out.rho_tilde.assign(n, 0.0);
  out.slowdown.assign(n, 1.0);
  out.d_rho_tilde_dx.assign(n, 0.0);

  switch (kernel.kind) {
    case Kernel::Kind::Zero:
      return out;  // rho_tilde == 0, slowdown == 1 exactly

    case Kernel::Kind::Uniform: {
      check_right_support(rho);
      // Suffix trapezoid of the remaining downstream mass.
      double s = 0.0;
      out.rho_tilde[n - 1] = 0.0;
      for (std::size_t i = n - 1; i-- > 0;) {
        s += 0.5 * dx * (rho[i] + rho[i + 1]);
        out.rho_tilde[i] = s;
      }
      simd::exp_neg(out.rho_tilde.data(), out.slowdown.data(), n);
      for (std::size_t i = 0; i < n; ++i) out.d_rho_tilde_dx[i] = -rho[i];
      break;
    }

    case Kernel::Kind::TruncatedExponential:
    case Kernel::Kind::CustomNonincreasing: {
      check_right_support(rho);
      const std::size_t window =
          std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(kernel.cutoff / dx)));
      std::vector<double> wz(window + 1);
      for (std::size_t k = 0; k <= window; ++k) wz[k] = kernel.w(k * dx);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t kmax = std::min(window, n - 1 - i);
        double s = 0.0;
        for (std::size_t k = 0; k <= kmax; ++k) {
          double term = wz[k] * rho[i + k];
          s += (k == 0 || k == kmax) ? 0.5 * term : term;
        }
        out.rho_tilde[i] = s * dx;
      }
      simd::exp_neg(out.rho_tilde.data(), out.slowdown.data(), n);
      central_derivative(out.rho_tilde, dx, out.d_rho_tilde_dx);
      break;
    }
  }

  check_bounds(out, trapezoid_mass(rho, dx), kernel.w0, dx);
  return out;
}

std::vector<double> interaction_integral(std::span<const double> rho, std::span<const double> u,
                                         const Kernel& kernel, const Grid& grid) {
  const std::size_t n = rho.size();
  if (u.size() != n || static_cast<int>(n) != grid.n)
    throw InvalidParameter("interaction_integral: field sizes do not match grid");
  std::vector<double> out(n, 0.0);
  if (kernel.kind == Kernel::Kind::Uniform || kernel.kind == Kernel::Kind::Zero) return out;

  const double dx = grid.dx();
  const std::size_t window =
      std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::ceil(kernel.cutoff / dx)));
  std::vector<double> wpz(window + 1);
  for (std::size_t k = 0; k <= window; ++k) wpz[k] = kernel.wprime(k * dx);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t kmax = std::min(window, n - 1 - i);
    double s = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
      double term = wpz[k] * rho[i + k] * (u[i + k] - u[i]);
      s += (k == 0 || k == kmax) ? 0.5 * term : term;
    }
    out[i] = s * dx;
  }
  return out;
}

}  // namespace narz
