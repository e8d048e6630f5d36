#pragma once

#include <stdexcept>
#include <string>

namespace tcshap {

// Base class for all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input content is malformed (ragged CSV, NaN in a numeric column, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Caller asked for something invalid (bad k, N above the exact limit, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tcshap
