#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frapm {

enum class ErrorKind {
  ZeroMassMeasure,
  InvalidParticle,
  InvalidInterval,
  NegativeDensity,
  TooLarge,
  InvalidParam,
  SublinearityViolated,
  EmptyLocationSet,
  OutOfDomain,
  NonFiniteLocation,
  NegativeMass,
  NonIntegralStepCount,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// Set when the error was raised inside a solver step.
  std::optional<int> step() const noexcept { return step_; }

  static Error at_step(const Error& inner, int step);

 private:
  ErrorKind kind_;
  std::optional<int> step_;
};

}  // namespace frapm
