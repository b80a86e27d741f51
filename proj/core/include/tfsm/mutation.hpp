#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tfsm/machine.hpp"

namespace tfsm {

enum class MutantKind {
  // attacks
  BatteryDrain,      // A1
  SleepDeprivation,  // A2
  DataFalsification, // A3
  Replay,            // A4
  ManInTheMiddle,    // A5
  IncreasedTimeout,  // INC
  // traditional single faults
  OutputFault,
  TimeoutFault,
  AddedTransition,
  NewState,
};

std::string_view to_string(MutantKind kind) noexcept;
MutantKind mutant_kind_from_string(std::string_view text);  // throws Error(SchemaError)
/// Short tag used in descriptor ids and reports: A1..A5, INC, TR.
std::string_view kind_tag(MutantKind kind) noexcept;
bool is_attack(MutantKind kind) noexcept;

inline constexpr Millis kDrainTimeout = 1000;
inline constexpr Millis kSleepTimeout = 1;
inline constexpr Millis kIncreasedTimeout = 5000;
inline constexpr Millis kInterceptTimeout = 2000;

struct SetTimeout {
  std::string state;
  Millis t_out = 0;
  bool operator==(const SetTimeout&) const = default;
};

struct SetOutput {
  std::string transition;
  std::string output;
  bool operator==(const SetOutput&) const = default;
};

/// Unguarded transition without updates.
struct AddTransition {
  std::string id;
  std::string src;
  std::string input;
  std::string output;
  std::string dst;
  bool operator==(const AddTransition&) const = default;
};

/// New state `state` becomes the destination of transition `reroute`; its
/// only outgoing edge is a timeout of `t_out` to `back`.
struct AddState {
  std::string state;
  std::string reroute;
  Millis t_out = 0;
  std::string back;
  bool operator==(const AddState&) const = default;
};

using Edit = std::variant<SetTimeout, SetOutput, AddTransition, AddState>;

struct MutantDescriptor {
  std::string id;
  MutantKind kind = MutantKind::OutputFault;
  Edit edit;
  bool operator==(const MutantDescriptor&) const = default;
};

struct MutantSet {
  std::string spec_id;
  std::optional<std::uint64_t> seed;  // traditional sweeps only
  std::vector<std::string> warnings;
  std::vector<MutantDescriptor> mutants;
  bool operator==(const MutantSet&) const = default;

  std::size_t count(MutantKind kind) const;
  const MutantDescriptor* find(std::string_view id) const;
};

// Attack generators. Targets come from the machine's attack profile;
// Error(MissingProfile) when the machine has none.
MutantSet gen_battery_drain(const Machine& m);
MutantSet gen_sleep_deprivation(const Machine& m);
MutantSet gen_data_falsification(const Machine& m);
MutantSet gen_replay(const Machine& m);
MutantSet gen_mitm(const Machine& m);
MutantSet gen_increased_timeout(const Machine& m);

/// Concatenation of the selected attack kinds in A1..A5, INC order. Emits
/// warnings where the profile's reported counts differ from the generated ones.
MutantSet gen_attacks(const Machine& m, const std::vector<MutantKind>& kinds);
std::vector<MutantKind> all_attack_kinds();

/// Seeded sweep of `budget` distinct single-fault mutants. Error(Exhausted)
/// when fewer exist, Error(InvalidArgument) when budget is 0.
MutantSet gen_traditional(const Machine& m, std::size_t budget, std::uint64_t seed);

/// The mutant keeps the reference model's machine id.
/// Errors: UnknownTarget, NoOp, Conflict, InvalidResult.
MachineDef apply_edit(const MachineDef& def, const Edit& edit);
Machine apply_descriptor(const Machine& m, const MutantDescriptor& d);

}  // namespace tfsm
