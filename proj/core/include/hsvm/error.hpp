#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsvm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (delta <= 0, J < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between model, data or buffers.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Label set incompatible with the requested model kind.
class LabelError : public Error {
 public:
  using Error::Error;
};

// Multi-class model violating We = 0 or e'b = 0 beyond tolerance.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Cached state inconsistent with its owner (e.g. margin cache of wrong length).
class StateError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed persisted model.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Malformed LIBSVM input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hsvm
