#pragma once

#include <stdexcept>
#include <string>

namespace knudsen {

/// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The drift speed lies outside the interval an operation is defined on.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check failed (quadrature, continuity, residual).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved = 0.0)
      : Error(what), achieved_(achieved) {}
  /// Error estimate or residual that triggered the failure.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, double last_residual, int iterations)
      : NumericalError(what, last_residual), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class IllConditioned : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace knudsen
