#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resdens {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidOrder : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidBandwidth : public Error {
 public:
  using Error::Error;
};

class AllTrimmed : public Error {
 public:
  AllTrimmed() : Error("all observations trimmed") {}
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class InsufficientReplications : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class LogDomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownKernel : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach its tolerance; carries the last observed
/// difference between successive refinements.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double last_deviation)
      : Error(what), last_deviation_(last_deviation) {}
  double last_deviation() const noexcept { return last_deviation_; }

 private:
  double last_deviation_;
};

/// Malformed or invalid input data. `line` is 1-based in the source file
/// (0 when the data did not come from a file).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Too many replications of an experiment failed.
class DegenerateExperiment : public Error {
 public:
  using Error::Error;
};

}  // namespace resdens
