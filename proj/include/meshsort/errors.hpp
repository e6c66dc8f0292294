#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshsort {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Innovation covariance could not be factorized.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Frames fed to a tracker out of order.
class SequenceError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (e.g. empty ground truth).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace meshsort
