#pragma once

#include <stdexcept>
#include <string>

namespace mitld {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised when an event's hazard is requested after all its mass is spent.
class ZeroSurvivalError : public Error {
 public:
  using Error::Error;
};

/// Structural problems with automata, games or products.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace mitld
