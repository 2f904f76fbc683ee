#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stokpp {

/// Base of every error raised by the library. `exit_code()` follows the CLI
/// contract: 2 for usage/configuration problems, 1 for runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// API called in a way its contract forbids (wrong kernel kind, empty input).
class MisuseError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (log of a nonpositive value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or runaway values during time stepping.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::int64_t step, std::int64_t node = -1);

  std::int64_t step() const noexcept { return step_; }
  std::int64_t node() const noexcept { return node_; }

 private:
  std::int64_t step_;
  std::int64_t node_;
};

/// A fill or update would break positivity.
class NumericError : public Error {
 public:
  using Error::Error;
};

class LevelNotAttainedError : public Error {
 public:
  using Error::Error;
};

class KernelNotRepresentableError : public Error {
 public:
  using Error::Error;
};

class DegenerateFrontError : public Error {
 public:
  using Error::Error;
};

class InsufficientDomainError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace stokpp
