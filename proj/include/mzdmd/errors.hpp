#ifndef MZDMD_ERRORS_HPP
#define MZDMD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mzdmd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decomposition failed to converge, overflow, or a non-finite result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public NumericalError {
 public:
  SingularityError(const std::string& what, double condition)
      : NumericalError(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

// Logarithm of a zero eigenvalue during spectral reconstruction.
class BranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : NumericalError(what + " at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace mzdmd

#endif  // MZDMD_ERRORS_HPP
