#include "tfsm/engine.hpp"

#include <sstream>

namespace tfsm {

Configuration initial_configuration(const Machine& m) {
  Configuration c;
  c.state = m.initial_state();
  c.env = m.initial_env();
  return c;
}

namespace {

void check_time(const Configuration& c, Millis until) {
  if (until < c.now)
    throw Error(ErrorKind::TimeTravel, "requested time " + std::to_string(until) +
                                           " precedes current time " + std::to_string(c.now));
}

// Index of the single enabled transition, -1 if none.
int select(const Machine& m, const Configuration& c, int input, const Value* param) {
  int chosen = -1;
  for (int t : m.transitions_from(c.state, input)) {
    if (!eval_guard(m.transition(t).guard.get(), c.env, param)) continue;
    if (chosen >= 0)
      throw Error(ErrorKind::NondeterministicModel,
                  "transitions '" + m.def().transitions[m.transition(chosen).decl].id + "' and '" +
                      m.def().transitions[m.transition(t).decl].id + "' are both enabled at " +
                      m.state_name(c.state));
    chosen = t;
  }
  return chosen;
}

void apply(Configuration& c, const Machine::Transition& t, const Value* param) {
  if (!t.updates.empty()) {
    // Right-hand sides read the pre-update valuation.
    std::vector<Value> next = c.env;
    for (const auto& [slot, e] : t.updates) next[slot] = eval(*e, c.env, param);
    c.env = std::move(next);
  }
  c.state = t.dst;
  c.clock = 0;
}

template <class OnFire>
void advance_impl(const Machine& m, Configuration& c, Millis until, OnFire&& on_fire) {
  while (true) {
    Millis t_out = m.timeout(c.state);
    if (t_out == kInfinite) break;
    Millis deadline = c.now + (t_out - c.clock);
    if (deadline > until) break;
    int from = c.state;
    c.state = m.timeout_dst(from);
    c.clock = 0;
    c.now = deadline;
    on_fire(TimeoutFiring{from, c.state, deadline, t_out});
  }
  c.clock += until - c.now;
  c.now = until;
}

}  // namespace

AdvanceResult advance(const Machine& m, Configuration c, Millis until) {
  check_time(c, until);
  AdvanceResult r;
  advance_impl(m, c, until, [&](const TimeoutFiring& f) { r.firings.push_back(f); });
  r.config = std::move(c);
  return r;
}

StepResult step_input(const Machine& m, Configuration c, const TimedInput& in) {
  check_time(c, in.at);
  int input = m.input_index(in.symbol);
  if (input < 0) throw Error(ErrorKind::UnknownInput, "unknown input '" + in.symbol + "'");
  const InputDecl& decl = m.input(input);
  if (decl.param_kind == ValueKind::None) {
    if (in.param)
      throw Error(ErrorKind::TypeMismatch, "input '" + in.symbol + "' takes no parameter");
  } else if (!in.param || kind_of(*in.param) != decl.param_kind) {
    throw Error(ErrorKind::TypeMismatch, "input '" + in.symbol + "' expects a " +
                                             std::string(to_string(decl.param_kind)) +
                                             " parameter");
  }

  StepResult r;
  advance_impl(m, c, in.at, [&](const TimeoutFiring& f) { r.firings.push_back(f); });
  r.local_time = c.clock;
  const Value* param = in.param ? &*in.param : nullptr;
  int t = select(m, c, input, param);
  if (t < 0) {
    r.output = std::string(kEpsilon);
  } else {
    const auto& tr = m.transition(t);
    apply(c, tr, param);
    r.output = std::string(m.output_name(tr.output));
    r.taken = &m.def().transitions[tr.decl];
  }
  r.config = std::move(c);
  return r;
}

std::vector<std::string> TimedTrace::outputs() const {
  std::vector<std::string> out;
  for (const auto& e : events)
    if (e.kind == TraceEvent::Kind::Input) out.push_back(e.output);
  return out;
}

TimedTrace run(const Machine& m, std::span<const TimedInput> seq,
               std::optional<Millis> observe_until) {
  return run_from(m, initial_configuration(m), seq, observe_until);
}

TimedTrace run_from(const Machine& m, Configuration start, std::span<const TimedInput> seq,
                    std::optional<Millis> observe_until) {
  TimedTrace trace;
  Configuration c = std::move(start);
  auto record_firings = [&](const std::vector<TimeoutFiring>& firings) {
    for (const auto& f : firings) {
      TraceEvent e;
      e.kind = TraceEvent::Kind::Timeout;
      e.at = f.at;
      e.local = f.t_out;
      e.from = m.state_name(f.from);
      e.to = m.state_name(f.to);
      e.output = std::string(kEpsilon);
      trace.events.push_back(std::move(e));
    }
  };
  for (std::size_t i = 0; i < seq.size(); ++i) {
    StepResult r;
    try {
      if (i > 0 && seq[i].at <= seq[i - 1].at)
        throw Error(ErrorKind::TimeTravel, "input timestamps must be strictly increasing");
      r = step_input(m, c, seq[i]);
    } catch (const Error& e) {
      throw RunError(e, i);
    }
    record_firings(r.firings);
    TraceEvent e;
    e.kind = TraceEvent::Kind::Input;
    e.at = seq[i].at;
    e.local = r.local_time;
    e.from = m.state_name(r.firings.empty() ? c.state : r.firings.back().to);
    e.to = m.state_name(r.config.state);
    e.input = seq[i];
    e.output = r.output;
    trace.events.push_back(std::move(e));
    c = std::move(r.config);
  }
  if (observe_until) {
    try {
      auto r = advance(m, c, *observe_until);
      record_firings(r.firings);
      c = std::move(r.config);
    } catch (const Error& e) {
      throw RunError(e, seq.size());
    }
  }
  trace.final_config = std::move(c);
  return trace;
}

std::string format_trace(const TimedTrace& trace) {
  std::ostringstream os;
  for (const auto& e : trace.events) {
    if (e.kind == TraceEvent::Kind::Timeout) {
      os << "(eps, t_out=" << e.local << ")";
      continue;
    }
    os << "((" << e.input.symbol;
    if (e.input.param) os << "(" << format_value(*e.input.param) << ")";
    os << ", t=" << e.local << "), " << e.output << ")";
  }
  return os.str();
}

namespace fast {

void advance(const Machine& m, Configuration& c, Millis until) {
  advance_impl(m, c, until, [](const TimeoutFiring&) {});
}

int step(const Machine& m, Configuration& c, int input, const Value* param, Millis at) {
  advance_impl(m, c, at, [](const TimeoutFiring&) {});
  int t = select(m, c, input, param);
  if (t < 0) return kEpsilonId;
  const auto& tr = m.transition(t);
  apply(c, tr, param);
  return tr.output;
}

}  // namespace fast

}  // namespace tfsm
