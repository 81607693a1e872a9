#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range indices, negative weights, inconsistent parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numerical procedure could not produce a usable answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The problem is too large for a dense method.
class CapacityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A dense computation overran its deadline.
class DeadlineExceeded : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace csc
