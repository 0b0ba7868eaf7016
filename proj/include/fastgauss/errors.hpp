#pragma once

#include <stdexcept>
#include <string>

namespace fastgauss {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization hit a pivot at or below the positive-definiteness threshold.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A distribution or configuration parameter is outside its domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastgauss
