#pragma once

#include <stdexcept>
#include <string>

namespace ritz {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input to a differentiable primitive (sqrt of a negative, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, divergence, blow-up during integration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Metric too close to singular to invert.
class DegenerateMetricError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Inconsistent shapes, unknown names, bad configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative method (shooting, endpoint regression) did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ritz
