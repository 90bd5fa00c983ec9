#include "narz/kernel.hpp"

#include <cmath>

#include "narz/errors.hpp"

namespace narz {

Kernel Kernel::uniform() {
  Kernel k;
  k.kind = Kind::Uniform;
  k.w0 = 1.0;
  k.w = [](double) { return 1.0; };
  k.wprime = [](double) { return 0.0; };
  k.cutoff = std::numeric_limits<double>::infinity();
  return k;
}

Kernel Kernel::zero() {
  Kernel k;
  k.kind = Kind::Zero;
  k.w0 = 0.0;
  k.w = [](double) { return 0.0; };
  k.wprime = [](double) { return 0.0; };
  k.cutoff = 0.0;
  return k;
}

Kernel Kernel::truncated_exponential(double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("kernel: eps must be positive");
  Kernel k;
  k.kind = Kind::TruncatedExponential;
  k.w0 = 1.0;
  k.cutoff = eps * std::log(1e16);  // w < 1e-16 beyond, jump there is negligible
  double cut = k.cutoff;
  k.w = [eps, cut](double z) { return z <= cut ? std::exp(-z / eps) : 0.0; };
  k.wprime = [eps, cut](double z) { return z <= cut ? -std::exp(-z / eps) / eps : 0.0; };
  return k;
}

Kernel Kernel::custom(std::function<double(double)> w, std::function<double(double)> wprime,
                      double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidParameter("kernel: cutoff must be positive");
  Kernel k;
  k.kind = Kind::CustomNonincreasing;
  k.w = std::move(w);
  k.wprime = std::move(wprime);
  k.cutoff = cutoff;
  k.w0 = k.w(0.0);
  if (!(k.w0 >= 0.0)) throw InvalidParameter("kernel: w(0) must be nonnegative");
  // Monotonicity spot check.
  double prev = k.w0;
  for (int i = 1; i <= 1000; ++i) {
    double z = cutoff * i / 1000.0;
    double v = k.w(z);
    if (v < 0.0 || v > prev + 1e-12)
      throw InvalidParameter("kernel: w must be nonnegative and non-increasing");
    prev = v;
  }
  return k;
}

const char* Kernel::name() const {
  switch (kind) {
    case Kind::Uniform: return "uniform";
    case Kind::TruncatedExponential: return "truncated-exponential";
    case Kind::CustomNonincreasing: return "custom-nonincreasing";
    case Kind::Zero: return "zero";
  }
  return "?";
}

}  // namespace narz
