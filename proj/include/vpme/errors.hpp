#pragma once

#include <stdexcept>
#include <string>

namespace vpme {

/// Invalid numeric parameter supplied to a constructor or operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (e.g. negative density).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query outside a stored grid or time window.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Ratio or fit requested on degenerate input.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Trajectory integration produced a non-finite state.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration did not reach tolerance. Carries the last residual.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vpme
