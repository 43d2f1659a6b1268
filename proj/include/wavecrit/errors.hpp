#pragma once

#include <stdexcept>
#include <string>

namespace wavecrit {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable identifier used by the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid_argument", message) {}
};

/// R0 <= 1: no non-trivial non-negative traveling wave exists.
class InvalidRegime : public Error {
 public:
  explicit InvalidRegime(const std::string& message)
      : Error("invalid_regime", message) {}
};

/// An internal consistency check failed (e.g. no admissible bound constants).
class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& message)
      : Error("consistency_error", message) {}
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& message)
      : Error("grid_mismatch", message) {}
};

/// A profile handed to the operator lies outside the order interval.
class GammaViolation : public Error {
 public:
  GammaViolation(const std::string& message, double xi, double amount)
      : Error("gamma_violation", message), xi_(xi), amount_(amount) {}

  double xi() const noexcept { return xi_; }
  double amount() const noexcept { return amount_; }

 private:
  double xi_;
  double amount_;
};

class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& message, long step, double time)
      : Error("instability", message), step_(step), time_(time) {}

  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

class InsufficientRecord : public Error {
 public:
  explicit InsufficientRecord(const std::string& message)
      : Error("insufficient_record", message) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line, std::string key)
      : Error("config_error", message), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

}  // namespace wavecrit
