#pragma once

#include <stdexcept>

namespace vpgeo {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input violates a contract precondition (bad dimensions, wrong frame,
/// malformed data). Distinct from numeric/geometric failure so callers can
/// map the two to different exit paths.
struct ValidationError : Error {
  using Error::Error;
};

/// Geometric or numeric failure on otherwise well-formed input.
struct NumericError : Error {
  using Error::Error;
};

/// A file could not be read or written.
struct IoError : Error {
  using Error::Error;
};

struct DegenerateLine : NumericError {
  using NumericError::NumericError;
};

struct ParallelLines : NumericError {
  using NumericError::NumericError;
};

struct DegenerateQuad : NumericError {
  using NumericError::NumericError;
};

struct DegenerateConfiguration : NumericError {
  using NumericError::NumericError;
};

struct BehindCamera : NumericError {
  using NumericError::NumericError;
};

struct ZeroVector : NumericError {
  using NumericError::NumericError;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct FrameMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct NoPositives : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace vpgeo
