#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmnn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input supplied by the caller (flags, shapes, malformed rows).
/// The CLI maps this family to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class MetricMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateDiameterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : ValidationError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class CoverLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmnn
