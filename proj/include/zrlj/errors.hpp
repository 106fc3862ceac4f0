#pragma once

#include <stdexcept>
#include <string>

namespace zrlj {

/// Argument outside the mathematical domain of an operation (s <= 1 for zeta,
/// phi beyond the radius of convergence, alpha >= m*, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series, root search or iterative solve did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (config file, CLI flags, rate table).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested parameter point that the limit theorems do not cover.
class UnsupportedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace zrlj
