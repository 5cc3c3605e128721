#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modunif {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected)
      : Error("syntax error at " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

// A formula uses a symbol its language does not have (nominal in L, [u] in H2, ...).
class LanguageError : public Error {
 public:
  using Error::Error;
};

// A formula's language does not match the frame or logic it is used with.
class LanguageMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownPoint : public Error {
 public:
  using Error::Error;
};

class UnboundSymbol : public Error {
 public:
  using Error::Error;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class DeterminismError : public Error {
 public:
  explicit DeterminismError(long state)
      : Error("two instructions for state " + std::to_string(state)), state_(state) {}
  long state() const noexcept { return state_; }

 private:
  long state_;
};

class TruncationUnsound : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotReachable : public Error {
 public:
  using Error::Error;
};

// Raised when a result fails its own re-verification. Indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace modunif
