#pragma once

#include <stdexcept>
#include <string>

namespace mrxi {

/// Base for every error raised by the library. The CLI maps subclasses onto
/// process exit codes (config 2, numeric 3, I/O 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field or kernel was requested at a point where it is singular.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input: configuration values, dimensions, ids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite values, failed factorization, undefined SNR).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrxi
