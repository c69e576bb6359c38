#pragma once

#include <stdexcept>
#include <string>

namespace hamclass {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A jet variable beyond the configured order bound was requested.
class JetOrderError : public Error {
 public:
  using Error::Error;
};

/// Mathematically undefined operation (0^-1, even root of a negative number...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition was violated by its input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Integration produced something outside the rational class (logarithm, arctan...).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A node or wall-clock budget was exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input; carries position information.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace hamclass
