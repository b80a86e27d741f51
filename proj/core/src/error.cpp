#include "tfsm/error.hpp"

namespace tfsm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::TimeTravel: return "TimeTravel";
    case ErrorKind::NondeterministicModel: return "NondeterministicModel";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnknownInput: return "UnknownInput";
    case ErrorKind::EvalError: return "EvalError";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::MissingProfile: return "MissingProfile";
    case ErrorKind::UnknownTransition: return "UnknownTransition";
    case ErrorKind::Conflict: return "Conflict";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::NoOp: return "NoOp";
    case ErrorKind::InvalidResult: return "InvalidResult";
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InconsistentAlive: return "InconsistentAlive";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::MutateUnsupported: return "MutateUnsupported";
    case ErrorKind::BindError: return "BindError";
    case ErrorKind::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

RunError::RunError(const Error& cause, std::size_t index) : Error(cause), index_(index) {}

}  // namespace tfsm
