#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mped {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input file. The message names the line or byte
/// offset where parsing stopped.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (K <= 0, unknown case id, size mismatch, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input does not satisfy an operation precondition (missing colors,
/// one-sided color presence, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// MetricConfig failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during an iterative procedure.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace mped
