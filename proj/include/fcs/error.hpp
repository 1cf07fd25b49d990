#pragma once

#include <stdexcept>
#include <string>

namespace fcs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, lengths or indices that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine (SVD, fixed-point iteration) failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented precondition (non-Hermitian matrix,
/// rank-deficient truncation, dense cap exceeded, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or persisted document.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcs
