#pragma once

#include <stdexcept>
#include <string>

namespace ultragest {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad parameter values, schema violations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent data at runtime (bad files, degenerate inputs,
/// scene geometry that cannot be rendered).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ultragest
