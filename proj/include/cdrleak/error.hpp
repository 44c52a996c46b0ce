#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdrleak {

enum class ErrorCode {
  DomainError,
  DamageCollapse,
  NoBracket,
  MaxIterations,
  SingularDerivative,
  NoInteriorOptimum,
  NoConvergence,
  NonPhysical,
  RejectionLimit,
  InvalidScenario,
  ConfigError,
  AssertionFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DamageCollapse: return "DamageCollapse";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::SingularDerivative: return "SingularDerivative";
    case ErrorCode::NoInteriorOptimum: return "NoInteriorOptimum";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::RejectionLimit: return "RejectionLimit";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code so
/// callers (sweeps, the CLI) can map it to an `ERR:<code>` cell or an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cdrleak
