// AVX2 variants of the array kernels. Same operation order as the scalar
// reference (mul/add, no FMA) so results match bitwise, except exp_neg which
// uses its own range-reduced polynomial and agrees to a few ulp.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace narz::simd::avx2 {

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d r = _mm256_add_pd(_mm256_mul_pd(va, vx), _mm256_mul_pd(vb, vy));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

namespace {

// exp(y) for y in [-700, 700]: y = k*ln2 + r with |r| <= ln2/2, then
// exp(y) = 2^k * P(r) with a degree-13 Taylor polynomial (error well below
// one ulp on the reduced interval).
inline __m256d exp_core(__m256d y) {
  const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d clamp_hi = _mm256_set1_pd(700.0);
  const __m256d clamp_lo = _mm256_set1_pd(-700.0);

  y = _mm256_min_pd(_mm256_max_pd(y, clamp_lo), clamp_hi);

  __m256d k = _mm256_round_pd(_mm256_mul_pd(y, inv_ln2),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(y, _mm256_mul_pd(k, ln2_hi));
  r = _mm256_sub_pd(r, _mm256_mul_pd(k, ln2_lo));

  const double c[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
                      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
                      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
                      1.0,                1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int j = 1; j < 14; ++j) p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(c[j]));

  // 2^k via the exponent field.
  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

}  // namespace

void exp_neg(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d y = _mm256_sub_pd(zero, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, exp_core(y));
  }
  if (i < n) {
    alignas(32) double buf[4] = {0, 0, 0, 0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = -x[j];
    __m256d r = exp_core(_mm256_load_pd(buf));
    _mm256_store_pd(buf, r);
    for (std::size_t j = i; j < n; ++j) out[j] = buf[j - i];
  }
}

double max_abs(const double* x, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_and_pd(_mm256_loadu_pd(x + i), abs_mask);
    vm = _mm256_max_pd(vm, v);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = lanes[0];
  for (int j = 1; j < 4; ++j)
    if (lanes[j] > m) m = lanes[j];
  for (; i < n; ++i) {
    double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

void minmod_slopes(const double* q, double* s, std::size_t n) {
  if (n == 0) return;
  s[0] = 0.0;
  if (n >= 2) s[n - 1] = 0.0;
  if (n < 3) return;

  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    __m256d qm = _mm256_loadu_pd(q + i - 1);
    __m256d qc = _mm256_loadu_pd(q + i);
    __m256d qp = _mm256_loadu_pd(q + i + 1);
    __m256d a = _mm256_sub_pd(qc, qm);
    __m256d b = _mm256_sub_pd(qp, qc);
    __m256d both_pos = _mm256_and_pd(_mm256_cmp_pd(a, zero, _CMP_GT_OQ),
                                     _mm256_cmp_pd(b, zero, _CMP_GT_OQ));
    __m256d both_neg = _mm256_and_pd(_mm256_cmp_pd(a, zero, _CMP_LT_OQ),
                                     _mm256_cmp_pd(b, zero, _CMP_LT_OQ));
    __m256d r = _mm256_or_pd(_mm256_and_pd(both_pos, _mm256_min_pd(a, b)),
                             _mm256_and_pd(both_neg, _mm256_max_pd(a, b)));
    _mm256_storeu_pd(s + i, r);
  }
  for (; i + 1 < n; ++i) {
    double a = q[i] - q[i - 1];
    double b = q[i + 1] - q[i];
    if (a > 0.0 && b > 0.0)
      s[i] = a < b ? a : b;
    else if (a < 0.0 && b < 0.0)
      s[i] = a > b ? a : b;
    else
      s[i] = 0.0;
  }
}

void llf_flux(const double* rho_l, const double* rho_r, const double* q_l, const double* q_r,
              const double* speed, double* flux, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d avg = _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(q_l + i),
                                                    _mm256_loadu_pd(q_r + i)));
    __m256d jump = _mm256_sub_pd(_mm256_loadu_pd(rho_r + i), _mm256_loadu_pd(rho_l + i));
    __m256d diss = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_loadu_pd(speed + i)), jump);
    _mm256_storeu_pd(flux + i, _mm256_sub_pd(avg, diss));
  }
  for (; i < n; ++i)
    flux[i] = 0.5 * (q_l[i] + q_r[i]) - 0.5 * speed[i] * (rho_r[i] - rho_l[i]);
}

void neg_scaled_diff(const double* f, double inv_dx, double* out, std::size_t n) {
  const __m256d vinv = _mm256_set1_pd(inv_dx);
  const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000ULL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + 1), _mm256_loadu_pd(f + i));
    __m256d neg = _mm256_xor_pd(d, sign_mask);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(neg, vinv));
  }
  for (; i < n; ++i) out[i] = -(f[i + 1] - f[i]) * inv_dx;
}

}  // namespace narz::simd::avx2

#endif  // x86
