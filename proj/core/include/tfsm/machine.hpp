#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tfsm/expr.hpp"
#include "tfsm/value.hpp"

namespace tfsm {

// ---------------------------------------------------------------------------
// Declarative machine content. This is what documents parse into and what
// mutation edits operate on. Names are used for every cross-reference.
// ---------------------------------------------------------------------------

struct StateDecl {
  std::string name;
  std::string label;
  bool reconstructed = false;
  bool operator==(const StateDecl&) const = default;
};

struct InputDecl {
  std::string name;
  ValueKind param_kind = ValueKind::None;
  std::string param_name;  // identifier bound in guards/updates; "p" when unset
  std::string label;
  bool reconstructed = false;
  bool operator==(const InputDecl&) const = default;
};

struct OutputDecl {
  std::string name;
  std::string label;
  bool reconstructed = false;
  bool operator==(const OutputDecl&) const = default;
};

struct VariableDecl {
  std::string name;
  ValueKind kind = ValueKind::Int;
  Value initial = std::int64_t{0};
  bool operator==(const VariableDecl&) const = default;
};

struct Assignment {
  std::string target;
  std::string expr;
  bool operator==(const Assignment&) const = default;
};

struct TransitionDecl {
  std::string id;
  std::string src;
  std::string input;
  std::string guard;  // empty means always enabled
  std::vector<Assignment> updates;
  std::string output;  // kEpsilon for the empty output
  std::string dst;
  bool reconstructed = false;
  bool operator==(const TransitionDecl&) const = default;
};

struct TimeoutDecl {
  std::string state;
  Millis t_out = kInfinite;
  std::string dst;
  bool reconstructed = false;
  bool operator==(const TimeoutDecl&) const = default;
};

struct ReplayTarget {
  std::string state;    // where the self-loop is added
  std::string copy_of;  // transition whose input/output is replayed
  bool operator==(const ReplayTarget&) const = default;
};

/// Targets for the attack generators. Bundled models carry one; user models
/// must provide one for the profile-driven generators.
struct AttackProfile {
  std::vector<std::string> drain_states;
  std::vector<std::string> sleep_states;
  std::vector<std::string> falsify_transitions;
  std::string falsify_output = "o6";
  std::optional<ReplayTarget> replay;
  std::vector<std::string> mitm_transitions;
  // Mutant counts reported elsewhere for this device, keyed by kind tag
  // (A1..A5, INC, total). Mismatches become generator warnings.
  std::map<std::string, int> reported;
  bool operator==(const AttackProfile&) const = default;
};

struct MachineDef {
  std::string id;
  std::vector<StateDecl> states;
  std::string initial;
  std::vector<InputDecl> inputs;
  std::vector<OutputDecl> outputs;
  std::vector<VariableDecl> variables;
  std::vector<TimeoutDecl> timeouts;
  std::vector<TransitionDecl> transitions;
  std::optional<AttackProfile> profile;
  bool operator==(const MachineDef&) const = default;

  const TransitionDecl* find_transition(std::string_view id) const;
  TransitionDecl* find_transition(std::string_view id);
  const TimeoutDecl* find_timeout(std::string_view state) const;
  TimeoutDecl* find_timeout(std::string_view state);
  bool has_state(std::string_view name) const;
  bool has_output(std::string_view name) const;
  const InputDecl* find_input(std::string_view name) const;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind {
  DanglingReference,
  DuplicateName,
  DuplicateId,
  ReservedName,
  TypeError,
  ExpressionSyntax,
  MissingTimeout,
  DuplicateTimeout,
  InvalidTimeout,
  GuardOverlap,
  EmptyMachine,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string path;  // e.g. "transitions[3].dst"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
  std::string to_string() const;
};

ValidationReport validate_machine(const MachineDef& def);

// ---------------------------------------------------------------------------
// Compiled machine: index-based, immutable, shareable across threads.
// ---------------------------------------------------------------------------

inline constexpr int kEpsilonId = -1;

class Machine {
 public:
  struct Transition {
    int src = 0;
    int input = 0;
    int output = kEpsilonId;
    int dst = 0;
    ExprPtr guard;  // null when always enabled
    std::vector<std::pair<int, ExprPtr>> updates;
    int decl = 0;  // index into def().transitions
  };

  /// Throws Error(SemanticError) listing every violation when invalid.
  static Machine compile(MachineDef def);

  const MachineDef& def() const { return def_; }
  const std::string& id() const { return def_.id; }

  int state_count() const { return static_cast<int>(def_.states.size()); }
  int input_count() const { return static_cast<int>(def_.inputs.size()); }
  int output_count() const { return static_cast<int>(def_.outputs.size()); }
  int variable_count() const { return static_cast<int>(def_.variables.size()); }

  int initial_state() const { return initial_; }
  int state_index(std::string_view name) const;    // -1 if unknown
  int input_index(std::string_view name) const;    // -1 if unknown
  int output_index(std::string_view name) const;   // kEpsilonId for eps, -2 if unknown
  int variable_index(std::string_view name) const; // -1 if unknown

  const std::string& state_name(int s) const { return def_.states[s].name; }
  const InputDecl& input(int i) const { return def_.inputs[i]; }
  std::string_view output_name(int o) const;

  Millis timeout(int state) const { return timeout_[state]; }
  int timeout_dst(int state) const { return timeout_dst_[state]; }

  std::span<const int> transitions_from(int state, int input) const;
  const Transition& transition(int t) const { return transitions_[t]; }
  int transition_count() const { return static_cast<int>(transitions_.size()); }

  std::vector<Value> initial_env() const;

  /// Literals appearing in guards and updates, for parameter pools.
  std::vector<Value> literals() const;

 private:
  Machine() = default;

  MachineDef def_;
  int initial_ = 0;
  std::unordered_map<std::string, int> state_ix_;
  std::unordered_map<std::string, int> input_ix_;
  std::unordered_map<std::string, int> output_ix_;
  std::unordered_map<std::string, int> var_ix_;
  std::vector<Millis> timeout_;
  std::vector<int> timeout_dst_;
  std::vector<Transition> transitions_;
  // dispatch_[state * inputs + input] -> range in dispatch_list_
  std::vector<std::pair<int, int>> dispatch_;
  std::vector<int> dispatch_list_;
};

}  // namespace tfsm
