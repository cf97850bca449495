#pragma once

#include <stdexcept>
#include <string>

namespace spdelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid/mode-count mismatch (even grid, grid too coarse, component mismatch).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A scheme, config or parameter failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A Fourier multiplier with an infinite symbol hit an active mode.
class InfiniteSymbolError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Adaptive quadrature could not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial_value,
                   double partial_error)
      : Error(what), partial_value_(partial_value), partial_error_(partial_error) {}
  double partial_value() const { return partial_value_; }
  double partial_error() const { return partial_error_; }

 private:
  double partial_value_;
  double partial_error_;
};

}  // namespace spdelab
