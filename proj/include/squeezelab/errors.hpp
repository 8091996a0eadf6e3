#pragma once

#include <stdexcept>
#include <string>

namespace squeezelab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Total Hilbert-space dimension would exceed the configured cap.
class DimensionCapError : public Error {
 public:
  using Error::Error;
};

/// Bad argument: mismatched dimensions, out-of-range index, invalid spin, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state or operator failed one of its structural invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A contract precondition (e.g. fixed particle number) does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerics produced something that should be impossible (imaginary
/// expectation of a Hermitian operator, non-converging eigensolve, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace squeezelab
