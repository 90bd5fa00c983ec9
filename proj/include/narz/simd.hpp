#pragma once

#include <cstddef>
#include <optional>
#include <string>

// Array kernels for the per-cell arithmetic of the solver. Every kernel has a
// scalar reference implementation and an AVX2 variant; the backend is selected
// once at startup from CPUID and can be overridden with the environment
// variable NONLOCAL_ARZ_SIMD=scalar|avx2 or force_backend() (tests).
//
// The two backends are bitwise-identical for the polynomial kernels (the AVX2
// code uses the same mul/add sequence, no FMA) and agree to a few ulp for
// exp_neg, which has its own range-reduced polynomial in the AVX2 path.

namespace narz::simd {

enum class Backend { Scalar, Avx2 };

/// Backend used by the free functions below.
Backend active_backend();
const char* backend_name(Backend b);

/// True if the AVX2 variant can run on this machine.
bool avx2_available();

/// Test hook: force a backend (nullopt restores automatic selection).
/// Throws InvalidParameter if the requested backend cannot run here.
void force_backend(std::optional<Backend> b);

/// out[i] = a*x[i] + b*y[i]
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);

/// out[i] = exp(-x[i])
void exp_neg(const double* x, double* out, std::size_t n);

/// max_i |x[i]|  (0 for n == 0)
double max_abs(const double* x, std::size_t n);

/// s[i] = minmod(q[i]-q[i-1], q[i+1]-q[i]) for 1 <= i <= n-2; s[0] = s[n-1] = 0.
void minmod_slopes(const double* q, double* s, std::size_t n);

/// flux[i] = 0.5*(q_l[i]+q_r[i]) - 0.5*speed[i]*(rho_r[i]-rho_l[i])
void llf_flux(const double* rho_l, const double* rho_r, const double* q_l, const double* q_r,
              const double* speed, double* flux, std::size_t n);

/// out[i] = -(f[i+1] - f[i]) * inv_dx for i in [0, n); f has n+1 entries.
void neg_scaled_diff(const double* f, double inv_dx, double* out, std::size_t n);

namespace detail {
// Raw per-backend entry points, exposed for the equivalence tests.
struct Ops {
  void (*axpby)(double, const double*, double, const double*, double*, std::size_t);
  void (*exp_neg)(const double*, double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*minmod_slopes)(const double*, double*, std::size_t);
  void (*llf_flux)(const double*, const double*, const double*, const double*, const double*,
                   double*, std::size_t);
  void (*neg_scaled_diff)(const double*, double, double*, std::size_t);
};
const Ops& ops_for(Backend b);
}  // namespace detail

}  // namespace narz::simd
