#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfsm/machine.hpp"

namespace tfsm {

/// Runtime point of a machine. `clock` is local (since the last reset),
/// `now` is the absolute virtual time the configuration is quiescent at.
struct Configuration {
  int state = 0;
  std::vector<Value> env;
  Millis clock = 0;
  Millis now = 0;
  bool operator==(const Configuration&) const = default;
};

Configuration initial_configuration(const Machine& m);

struct TimeoutFiring {
  int from = 0;
  int to = 0;
  Millis at = 0;     // absolute
  Millis t_out = 0;  // the deadline that expired
};

struct AdvanceResult {
  Configuration config;
  std::vector<TimeoutFiring> firings;
};

/// Fires every timeout due at or before `until`. Throws Error(TimeTravel).
AdvanceResult advance(const Machine& m, Configuration c, Millis until);

struct TimedInput {
  std::string symbol;
  std::optional<Value> param;
  Millis at = 0;  // absolute
  bool operator==(const TimedInput&) const = default;
};

struct StepResult {
  Configuration config;
  std::string output;                  // output name or kEpsilon
  std::vector<TimeoutFiring> firings;  // fired before the input was applied
  Millis local_time = 0;               // state-local time the input arrived at
  const TransitionDecl* taken = nullptr;
};

/// Applies a timed input. Timeouts due at exactly `in.at` fire first; an input
/// with no enabled transition yields eps and leaves the configuration as is.
/// Throws Error(TimeTravel | UnknownInput | TypeMismatch | NondeterministicModel).
StepResult step_input(const Machine& m, Configuration c, const TimedInput& in);

struct TraceEvent {
  enum class Kind { Timeout, Input };
  Kind kind = Kind::Input;
  Millis at = 0;
  Millis local = 0;  // local time of the input, or the expired t_out
  std::string from;
  std::string to;
  TimedInput input;    // Input only
  std::string output;  // Input only (kEpsilon for timeouts)
};

struct TimedTrace {
  std::vector<TraceEvent> events;
  Configuration final_config;

  /// Outputs produced by the inputs, in order (eps included).
  std::vector<std::string> outputs() const;
};

/// Starts at the initial configuration. When `observe_until` is set, time is
/// advanced to it after the last input so trailing timeouts are recorded.
/// Throws RunError carrying the offending index.
TimedTrace run(const Machine& m, std::span<const TimedInput> seq,
               std::optional<Millis> observe_until = std::nullopt);

TimedTrace run_from(const Machine& m, Configuration start, std::span<const TimedInput> seq,
                    std::optional<Millis> observe_until = std::nullopt);

/// Renders e.g. "(eps, t_out=2000)((i1, t=1000), o1)".
std::string format_trace(const TimedTrace& trace);

// Index-based fast path used by search. Same semantics as step_input but
// without recording, name lookup, or parameter kind checks.
namespace fast {

void advance(const Machine& m, Configuration& c, Millis until);
int step(const Machine& m, Configuration& c, int input, const Value* param, Millis at);

}  // namespace fast

}  // namespace tfsm
