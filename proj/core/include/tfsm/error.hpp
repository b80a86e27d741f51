#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tfsm {

enum class ErrorKind {
  // execution
  TimeTravel,
  NondeterministicModel,
  TypeMismatch,
  UnknownInput,
  EvalError,
  // documents
  SyntaxError,
  SchemaError,
  SemanticError,
  UnknownModel,
  // mutation
  MissingProfile,
  UnknownTransition,
  Conflict,
  UnknownTarget,
  NoOp,
  InvalidResult,
  Exhausted,
  // test generation
  AlphabetMismatch,
  BudgetExceeded,
  InconsistentAlive,
  InvalidArgument,
  // harness
  TransportError,
  MutateUnsupported,
  BindError,
  ProtocolError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by run() when an input of the sequence fails; carries the position.
class RunError : public Error {
 public:
  RunError(const Error& cause, std::size_t index);

  std::size_t index() const noexcept { return index_; }
  ErrorKind cause() const noexcept { return kind(); }

 private:
  std::size_t index_;
};

}  // namespace tfsm
