#pragma once

#include <stdexcept>
#include <string>

namespace svc {

enum class ErrorKind {
  DuplicateEdge,
  SelfLoop,
  ProbabilityOutOfRange,
  EndpointOutOfRange,
  InstanceTooLarge,
  NonCanonicalOracle,
  ParameterOutOfRange,
  ConditionalCompletionUnsupported,
  ScenarioSpaceUnavailable,
  PartitionNotDisjoint,
  InvalidRSGraph,
  ScenarioUnknown,
  ParseError,
  ValidationError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorKind::EndpointOutOfRange: return "EndpointOutOfRange";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::NonCanonicalOracle: return "NonCanonicalOracle";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::ConditionalCompletionUnsupported: return "ConditionalCompletionUnsupported";
    case ErrorKind::ScenarioSpaceUnavailable: return "ScenarioSpaceUnavailable";
    case ErrorKind::PartitionNotDisjoint: return "PartitionNotDisjoint";
    case ErrorKind::InvalidRSGraph: return "InvalidRSGraph";
    case ErrorKind::ScenarioUnknown: return "ScenarioUnknown";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace svc
