#include <cmath>
#include <cstddef>

// Scalar reference kernels. These define the semantics the AVX2 variants are
// tested against.

namespace narz::simd::scalar {

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void exp_neg(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-x[i]);
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

static inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return a < b ? a : b;
  if (a < 0.0 && b < 0.0) return a > b ? a : b;
  return 0.0;
}

void minmod_slopes(const double* q, double* s, std::size_t n) {
  if (n == 0) return;
  s[0] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) s[i] = minmod(q[i] - q[i - 1], q[i + 1] - q[i]);
  s[n - 1] = 0.0;
}

void llf_flux(const double* rho_l, const double* rho_r, const double* q_l, const double* q_r,
              const double* speed, double* flux, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    flux[i] = 0.5 * (q_l[i] + q_r[i]) - 0.5 * speed[i] * (rho_r[i] - rho_l[i]);
}

void neg_scaled_diff(const double* f, double inv_dx, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -(f[i + 1] - f[i]) * inv_dx;
}

}  // namespace narz::simd::scalar
