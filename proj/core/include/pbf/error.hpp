#pragma once

#include <stdexcept>
#include <string>

namespace pbf {

// Root of every exception thrown by the library. Subclasses map onto the
// distinct exit codes of the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a library call (dimension mismatch, slot out of range,
// nonpositive tolerance, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

// A computed object failed one of its structural invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RankAmbiguityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GradingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConservationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonHermitianError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Representation-file parse failures.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace pbf
