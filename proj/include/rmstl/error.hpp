#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmstl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula or guard text. `position` is a byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected, std::string found)
      : Error("syntax error at position " + std::to_string(position) + ": expected " + expected +
              ", found " + found),
        position_(position),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t position_;
  std::string expected_;
  std::string found_;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class EmptyInterval : public Error {
 public:
  EmptyInterval(long long lo, long long hi)
      : Error("empty interval [" + std::to_string(lo) + "," + std::to_string(hi) + "]") {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class OutOfRecordedRange : public Error {
 public:
  using Error::Error;
};

class HorizonExceedsSignal : public Error {
 public:
  using Error::Error;
};

/// Raised at monitor time for `==` / `!=` predicates, whose robustness is degenerate.
class UnsupportedPredicate : public Error {
 public:
  using Error::Error;
};

class UnknownState : public Error {
 public:
  explicit UnknownState(const std::string& name) : Error("unknown state '" + name + "'") {}
};

class UnknownAtom : public Error {
 public:
  explicit UnknownAtom(const std::string& name) : Error("unknown atom '" + name + "'") {}
};

class NoInitialState : public Error {
 public:
  explicit NoInitialState(const std::string& machine)
      : Error("machine '" + machine + "' has no valid initial state") {}
};

class StepAfterTerminal : public Error {
 public:
  StepAfterTerminal() : Error("step called on a finished episode") {}
};

/// Task spec rejected; `what()` carries "<source>:<line>: message".
class SpecValidationError : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& name) : Error("missing column '" + name + "'") {}
};

}  // namespace rmstl
