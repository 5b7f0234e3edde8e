#pragma once

#include <stdexcept>
#include <string>

namespace motiq {

/// Invalid user input: malformed expressions, bad configuration,
/// hyperparameters that cannot produce a valid circuit.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: non-finite cost, eigensolver non-convergence.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace motiq
