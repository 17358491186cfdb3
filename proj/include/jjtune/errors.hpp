#pragma once

#include <stdexcept>
#include <string>

namespace jjtune {

// Input outside the mathematical domain of an operation (negative current, R <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration, file or CLI input. Carries an optional 1-based line number.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// Iterative solver gave up; `residual` is the best residual norm reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A request that the physics or the safety limits cannot satisfy.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jjtune
