#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wom {

enum class ErrorKind {
  // network validation
  NotStronglyConnected,
  NonPositiveDelay,
  DuplicateLink,
  ExplicitSelfLoop,
  InvalidAgent,
  // instance validation
  DistributionNotNormalized,
  ShapeMismatch,
  AgentCountMismatch,
  InvalidMemory,
  // strategy / schema usage
  DomainMismatch,
  IndexOrder,
  OutOfRange,
  SchemaMismatch,
  // inference
  ZeroProbabilityCondition,
  ImpossibleObservation,
  MissingConditional,
  // search
  CapExceeded,
  // input
  Parse,
};

inline std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers map failures
/// onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_validation() const noexcept {
    switch (kind_) {
      case ErrorKind::NotStronglyConnected:
      case ErrorKind::NonPositiveDelay:
      case ErrorKind::DuplicateLink:
      case ErrorKind::ExplicitSelfLoop:
      case ErrorKind::InvalidAgent:
      case ErrorKind::DistributionNotNormalized:
      case ErrorKind::ShapeMismatch:
      case ErrorKind::AgentCountMismatch:
      case ErrorKind::InvalidMemory:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorKind::NonPositiveDelay: return "NonPositiveDelay";
    case ErrorKind::DuplicateLink: return "DuplicateLink";
    case ErrorKind::ExplicitSelfLoop: return "ExplicitSelfLoop";
    case ErrorKind::InvalidAgent: return "InvalidAgent";
    case ErrorKind::DistributionNotNormalized: return "DistributionNotNormalized";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::AgentCountMismatch: return "AgentCountMismatch";
    case ErrorKind::InvalidMemory: return "InvalidMemory";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::IndexOrder: return "IndexOrder";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
    case ErrorKind::ImpossibleObservation: return "ImpossibleObservation";
    case ErrorKind::MissingConditional: return "MissingConditional";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace wom
