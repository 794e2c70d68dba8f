#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace esd {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed config, unknown ids.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input lacks the X pattern required by an X-state-only formula.
class StructureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A computation failed numerically. Carries the time of failure when known.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::optional<double> time = std::nullopt)
      : Error(time ? what + " (t = " + std::to_string(*time) + ")" : what), time_(time) {}

  std::optional<double> time() const noexcept { return time_; }

 private:
  std::optional<double> time_;
};

/// Adaptive step size collapsed or the state became non-finite.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Riccati variable diverged; the disentangled form is singular at `time()`.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Exponential overflow while evaluating map coefficients.
class RangeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Density matrix is materially non-positive.
class PhysicalityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace esd
