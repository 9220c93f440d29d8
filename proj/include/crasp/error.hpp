#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crasp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax and validation errors in program or machine text.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(format(msg, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line,
                            std::size_t column) {
    if (line == 0) return msg;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
  }
  std::size_t line_;
  std::size_t column_;
};

class DialectError : public Error {
 public:
  using Error::Error;
};

class TokenError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace crasp
