#pragma once

#include <stdexcept>
#include <string>

namespace polyspline {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent caller input (bad knots, length mismatch, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Frequency outside the supported range (k = 0, or |k| = 1 where the
/// construction does not exist).
class UnsupportedFrequency : public InputError {
 public:
  using InputError::InputError;
};

/// A documented precondition of a verification routine does not hold.
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

/// An improper integral does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A linear system could not be solved to the requested accuracy.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace polyspline
