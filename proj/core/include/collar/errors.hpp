#pragma once

#include <stdexcept>
#include <string>

namespace collar {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// Tensor powers of two sections do not match the operation's contract.
struct PowerMismatchError : Error {
  using Error::Error;
};

/// A combined exponent left the representable range of double.
struct OverflowError : Error {
  OverflowError(const std::string& msg, int mode) : Error(msg), offending_mode(mode) {}
  int offending_mode = 0;
};

/// Adaptive quadrature failed to reach the requested tolerance.
struct AccuracyError : Error {
  AccuracyError(const std::string& msg, double prev, double last)
      : Error(msg), previous_estimate(prev), last_estimate(last) {}
  double previous_estimate = 0.0;
  double last_estimate = 0.0;
};

/// Boundary sample count too small for the requested mode range.
struct AliasingError : Error {
  using Error::Error;
};

/// A weighted Gram system is too ill-conditioned to trust.
struct ConditioningError : Error {
  ConditioningError(const std::string& msg, double cond) : Error(msg), condition(cond) {}
  double condition = 0.0;
};

/// Evaluation requested too close to a logarithmic singularity.
struct SingularityError : Error {
  using Error::Error;
};

/// Corona denominator fell below the configured floor.
struct DecompositionError : Error {
  DecompositionError(const std::string& msg, double rho, double theta)
      : Error(msg), at_rho(rho), at_theta(theta) {}
  double at_rho = 0.0;
  double at_theta = 0.0;
};

/// Two sampled grids that must match do not.
struct GridMismatchError : Error {
  using Error::Error;
};

}  // namespace collar
