#pragma once

#include <stdexcept>
#include <string>

namespace narz {

/// Bad constructor or operation argument (J < 1, nonpositive denominator, ...).
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Density mass touches the domain boundary; the truncated domain is too small
/// for the look-ahead integral (or the wave reached the edge mid-run).
struct TruncatedSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NaN/Inf appeared during time stepping; message carries the stage context.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computed field left its a-priori bounds by more than the allowed slack.
struct InvariantBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive ODE integration could not proceed (step-size underflow).
struct OdeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation requires a flux family the given model does not belong to.
struct UnsupportedModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A derived constant is undefined because its preconditions failed.
struct UndefinedConstant : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment configuration could not be parsed or validated.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace narz
