#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alexcmp {

enum class ErrorKind {
  InvalidArgument,
  DomainError,
  InvalidTriple,
  RangeError,
  UnknownPoint,
  Disconnected,
  MalformedInput,
  NonPositiveWeight,
  DegenerateGeodesic,
  NotInterior,
  EmptyBall,
  OutOfRegime,
  NoNegativeExcess,
  NoCertifiedSubAngle,
  IterationBudgetExceeded,
  ResolutionFloor,
  WitnessNotFound,
  BudgetExceeded,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported as an Error carrying a kind so
/// callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::UnknownPoint: return "UnknownPoint";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::DegenerateGeodesic: return "DegenerateGeodesic";
    case ErrorKind::NotInterior: return "NotInterior";
    case ErrorKind::EmptyBall: return "EmptyBall";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::NoNegativeExcess: return "NoNegativeExcess";
    case ErrorKind::NoCertifiedSubAngle: return "NoCertifiedSubAngle";
    case ErrorKind::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorKind::ResolutionFloor: return "ResolutionFloor";
    case ErrorKind::WitnessNotFound: return "WitnessNotFound";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

}  // namespace alexcmp
