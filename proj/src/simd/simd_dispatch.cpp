#include "narz/simd.hpp"

#include <cstdlib>
#include <cstring>

#include "narz/errors.hpp"

namespace narz::simd {

namespace scalar {
void axpby(double, const double*, double, const double*, double*, std::size_t);
void exp_neg(const double*, double*, std::size_t);
double max_abs(const double*, std::size_t);
void minmod_slopes(const double*, double*, std::size_t);
void llf_flux(const double*, const double*, const double*, const double*, const double*, double*,
              std::size_t);
void neg_scaled_diff(const double*, double, double*, std::size_t);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
void axpby(double, const double*, double, const double*, double*, std::size_t);
void exp_neg(const double*, double*, std::size_t);
double max_abs(const double*, std::size_t);
void minmod_slopes(const double*, double*, std::size_t);
void llf_flux(const double*, const double*, const double*, const double*, const double*, double*,
              std::size_t);
void neg_scaled_diff(const double*, double, double*, std::size_t);
}  // namespace avx2
#endif

namespace detail {

const Ops& ops_for(Backend b) {
  static const Ops scalar_ops = {scalar::axpby,         scalar::exp_neg,  scalar::max_abs,
                                 scalar::minmod_slopes, scalar::llf_flux, scalar::neg_scaled_diff};
#if defined(__x86_64__) || defined(__i386__)
  static const Ops avx2_ops = {avx2::axpby,         avx2::exp_neg,  avx2::max_abs,
                               avx2::minmod_slopes, avx2::llf_flux, avx2::neg_scaled_diff};
  if (b == Backend::Avx2) return avx2_ops;
#endif
  (void)b;
  return scalar_ops;
}

}  // namespace detail

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend detect_backend() {
  if (const char* env = std::getenv("NONLOCAL_ARZ_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::Avx2;
    return Backend::Scalar;
  }
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

Backend& current() {
  static Backend b = detect_backend();
  return b;
}

}  // namespace

Backend active_backend() { return current(); }

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void force_backend(std::optional<Backend> b) {
  if (!b) {
    current() = detect_backend();
    return;
  }
  if (*b == Backend::Avx2 && !avx2_available())
    throw InvalidParameter("simd: avx2 backend not available on this machine");
  current() = *b;
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  detail::ops_for(current()).axpby(a, x, b, y, out, n);
}

void exp_neg(const double* x, double* out, std::size_t n) {
  detail::ops_for(current()).exp_neg(x, out, n);
}

double max_abs(const double* x, std::size_t n) { return detail::ops_for(current()).max_abs(x, n); }

void minmod_slopes(const double* q, double* s, std::size_t n) {
  detail::ops_for(current()).minmod_slopes(q, s, n);
}

void llf_flux(const double* rho_l, const double* rho_r, const double* q_l, const double* q_r,
              const double* speed, double* flux, std::size_t n) {
  detail::ops_for(current()).llf_flux(rho_l, rho_r, q_l, q_r, speed, flux, n);
}

void neg_scaled_diff(const double* f, double inv_dx, double* out, std::size_t n) {
  detail::ops_for(current()).neg_scaled_diff(f, inv_dx, out, n);
}

}  // namespace narz::simd
