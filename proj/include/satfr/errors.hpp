#pragma once

#include <stdexcept>
#include <string>

namespace satfr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value broke one of its invariants. Carries the offending
/// field path (e.g. "controller.k_v") and the rule it violated.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, std::string rule)
      : Error(field + ": " + rule), field_(std::move(field)), rule_(std::move(rule)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string field_;
  std::string rule_;
};

/// A numeric argument is outside the domain of the function (e.g. B <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The amplitude scan found no sign change of the balance residual.
class NoRootFound : public Error {
 public:
  NoRootFound(double g_first, double g_last, double b_max);

  double g_first() const noexcept { return g_first_; }
  double g_last() const noexcept { return g_last_; }

 private:
  double g_first_;
  double g_last_;
};

/// The incremental loop H(jw) has a pole on the evaluated locus.
class PoleOnLocus : public Error {
 public:
  using Error::Error;
};

/// The frequency response is undefined (leader amplitude R = 0).
class UndefinedResponse : public Error {
 public:
  using Error::Error;
};

/// The fixed-step integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(long long step)
      : Error("simulation diverged at step " + std::to_string(step)), step_(step) {}

  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace satfr
