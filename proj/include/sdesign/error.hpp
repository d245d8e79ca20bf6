#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdesign {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (|u| > 1, m > l, non-unit point, s <= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The design matrix is singular or too ill-conditioned to be trusted.
class NotFundamentalError : public Error {
 public:
  using Error::Error;
};

// Floating point breakdown (e.g. a large negative squared error).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A precondition of a theorem-backed routine does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sdesign
