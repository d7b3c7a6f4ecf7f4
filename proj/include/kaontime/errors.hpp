#pragma once

#include <stdexcept>
#include <string>

namespace kaontime {

// Numerical failure: non-convergence, vanishing normalization, refusal to
// sample a sign-indefinite density.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct NegativeDensityError : NumericalError {
  using NumericalError::NumericalError;
};

struct EnvelopeDegenerateError : NumericalError {
  using NumericalError::NumericalError;
};

// q vanishes on a region where p does not.
struct SupportMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bin merging cannot reach the minimum expected count.
struct TooFewEventsError : NumericalError {
  using NumericalError::NumericalError;
};

// Requested closed form is not available.
struct UnsupportedCombinationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Config file / flag validation failure.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kaontime
