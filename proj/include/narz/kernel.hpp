#pragma once

#include <functional>
#include <limits>
#include <string>

namespace narz {

/// Look-ahead weight w(z), z >= 0: nonnegative, bounded, non-increasing.
///
/// The uniform kernel (w == 1, infinite support) is the one with the exact
/// identity d/dx of the look-ahead mass = -rho; the zero kernel realizes the
/// degenerate local models. Truncated-exponential and custom kernels are for
/// experimentation.
struct Kernel {
  enum class Kind { Uniform, TruncatedExponential, CustomNonincreasing, Zero };

  Kind kind = Kind::Uniform;
  double w0 = 1.0;  ///< w(0)
  std::function<double(double)> w;
  std::function<double(double)> wprime;  ///< a.e. derivative (0 for uniform/zero)
  double cutoff = std::numeric_limits<double>::infinity();  ///< support [0, cutoff]

  static Kernel uniform();
  static Kernel zero();
  /// w(z) = exp(-z/eps) truncated where it falls below 1e-16.
  static Kernel truncated_exponential(double eps);
  static Kernel custom(std::function<double(double)> w, std::function<double(double)> wprime,
                       double cutoff);

  const char* name() const;
};

}  // namespace narz
