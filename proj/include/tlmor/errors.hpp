#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tlmor {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: shapes, files, configuration. Maps to CLI exit code 1.
class InputError : public Error {
public:
  using Error::Error;
};

/// A numerical precondition failed at run time. Maps to CLI exit code 2.
class NumericalError : public Error {
public:
  using Error::Error;
};

class DimensionError : public InputError {
public:
  using InputError::InputError;
};

class NonFiniteError : public InputError {
public:
  using InputError::InputError;
};

class ClosureError : public InputError {
public:
  using InputError::InputError;
};

class ConfigError : public InputError {
public:
  using InputError::InputError;
};

class ParseError : public InputError {
public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)), line_(line) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

class SingularEquationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularShiftError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class RankError : public NumericalError {
public:
  RankError(const std::string& what, std::ptrdiff_t rank)
      : NumericalError(what + " (numerical rank " + std::to_string(rank) + ")"), rank_(rank) {}
  std::ptrdiff_t rank() const noexcept { return rank_; }

private:
  std::ptrdiff_t rank_;
};

class StabilityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class DecompositionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ConditioningError : public NumericalError {
public:
  ConditioningError(const std::string& what, double condition)
      : NumericalError(what + " (condition " + std::to_string(condition) + ")"), condition_(condition) {}
  double condition() const noexcept { return condition_; }

private:
  double condition_;
};

/// The reduced Gramian factor is not positive definite.
class PseudoOptimalityError : public NumericalError {
public:
  PseudoOptimalityError(const std::string& what, double smallest)
      : NumericalError(what + " (smallest eigenvalue " + std::to_string(smallest) + ")"),
        smallest_(smallest) {}
  double smallest_eigenvalue() const noexcept { return smallest_; }

private:
  double smallest_;
};

class PolePlacementError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class AccumulationError : public NumericalError {
public:
  AccumulationError(const std::string& what, int step)
      : NumericalError("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

}  // namespace tlmor
