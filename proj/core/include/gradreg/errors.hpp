#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gradreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: wrong dimension, non-finite entries, violated preconditions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Floating-point breakdown: failed factorization, overflow, CG stall.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Text input that could not be parsed. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace gradreg
