#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eschlab {

/// Argument outside the domain where a function is defined (log potential
/// outside (alpha, beta), angles at the poles, points outside an interval).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Operation requested for a model variant that does not support it.
class UnsupportedError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParamsError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Newton (or other iterative) solve that failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                           ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

class SingularSystemError : public std::runtime_error {
public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : std::runtime_error(what + " (condition estimate " +
                           std::to_string(condition_estimate) + ")"),
        condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  double condition_estimate_;
};

/// Adaptive step halving reached a step that no longer advances time.
class StepUnderflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeshTanglingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Configuration text error, carries the 1-based line number (0 if unknown).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace eschlab
