#pragma once

#include <stdexcept>
#include <string>

namespace uniperf {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A ring whose inner radius is not strictly below its outer radius.
class DegenerateRing : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside the hypotheses that license it.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (files, flags, preset names).
class InputError : public Error {
 public:
  InputError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_ = 0;
};

}  // namespace uniperf
