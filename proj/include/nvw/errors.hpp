#pragma once

#include <stdexcept>
#include <string>

namespace nvw {

/// Process exit codes. Mathematical failure modes get their own code so that
/// scripts can tell a wavebreaking run from a bad config.
enum class ExitCode : int {
  ok = 0,
  failure = 1,
  usage = 2,
  degeneracy = 3,
  non_contraction = 4,
  wavebreaking = 5,
  domain = 6,
  budget = 7,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode code() const noexcept { return ExitCode::failure; }
};

/// Invalid configuration or precondition violated by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::usage; }
};

/// s reached zero (or 1/s exceeded its budget); the polar form is singular.
class DegeneracyError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::degeneracy; }
};

/// A fixed-point iteration failed to contract within its iteration cap.
class NonContractionError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::non_contraction; }
};

class WavebreakingError : public Error {
 public:
  WavebreakingError(const std::string& what, double time)
      : Error(what), time_(time) {}
  ExitCode code() const noexcept override { return ExitCode::wavebreaking; }
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Query outside the grid, or a perturbation reached the truncated boundary.
class DomainError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::domain; }
};

/// |zeta| >= 1 or the a priori bound was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::budget; }
};

}  // namespace nvw
