#pragma once

#include <stdexcept>
#include <string>

namespace browkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required column, field or landmark role is missing or malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A value in an input file could not be parsed. Carries a human readable
/// location (row/column or line number) in the message.
class ParseError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

/// Geometry that has no well-defined answer (coincident line points,
/// collinear point sets, constant scaling groups).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Least-squares design matrix is numerically rank deficient.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller (bad sizes, empty inputs, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace browkit
