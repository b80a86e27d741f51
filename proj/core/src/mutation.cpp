#include "tfsm/mutation.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>

namespace tfsm {

namespace {

struct KindInfo {
  MutantKind kind;
  std::string_view name;
  std::string_view tag;
};

constexpr std::array<KindInfo, 10> kKinds{{
    {MutantKind::BatteryDrain, "battery_drain", "A1"},
    {MutantKind::SleepDeprivation, "sleep_deprivation", "A2"},
    {MutantKind::DataFalsification, "data_falsification", "A3"},
    {MutantKind::Replay, "replay", "A4"},
    {MutantKind::ManInTheMiddle, "man_in_the_middle", "A5"},
    {MutantKind::IncreasedTimeout, "increased_timeout", "INC"},
    {MutantKind::OutputFault, "output_fault", "TR"},
    {MutantKind::TimeoutFault, "timeout_fault", "TR"},
    {MutantKind::AddedTransition, "added_transition", "TR"},
    {MutantKind::NewState, "new_state", "TR"},
}};

const KindInfo& info(MutantKind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i;
  return kKinds[0];
}

std::string numbered(std::string_view tag, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, n);
  return std::string(tag) + "-" + buf;
}

const AttackProfile& profile_of(const Machine& m) {
  if (!m.def().profile)
    throw Error(ErrorKind::MissingProfile,
                "machine '" + m.id() + "' has no attack profile; add a 'profile' section listing target states and transitions");
  return *m.def().profile;
}

const TransitionDecl& transition_of(const Machine& m, const std::string& id) {
  const TransitionDecl* t = m.def().find_transition(id);
  if (!t) throw Error(ErrorKind::UnknownTransition, "profile names unknown transition '" + id + "'");
  return *t;
}

std::string next_transition_id(const MachineDef& def) {
  long best = 0;
  for (const auto& t : def.transitions) {
    if (t.id.size() < 2 || t.id[0] != 't') continue;
    if (!std::all_of(t.id.begin() + 1, t.id.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    best = std::max(best, std::stol(t.id.substr(1)));
  }
  std::string id = "t" + std::to_string(best + 1);
  while (def.find_transition(id)) id += "_";
  return id;
}

std::string fresh_state_name(const MachineDef& def) {
  std::string name = "Snew";
  for (int k = 2; def.has_state(name); ++k) name = "Snew" + std::to_string(k);
  return name;
}

MutantSet timeout_set(const Machine& m, MutantKind kind, const std::vector<std::string>& states,
                      Millis value) {
  MutantSet set;
  set.spec_id = m.id();
  for (const auto& s : states) {
    const TimeoutDecl* t = m.def().find_timeout(s);
    if (!t) throw Error(ErrorKind::UnknownTarget, "profile names unknown state '" + s + "'");
    if (t->t_out == value) {
      set.warnings.push_back(std::string(kind_tag(kind)) + ": state " + s + " already has t_out " +
                             std::to_string(value) + " ms; no mutant generated");
      continue;
    }
    set.mutants.push_back({numbered(kind_tag(kind), set.mutants.size() + 1, 2), kind, SetTimeout{s, value}});
  }
  return set;
}

void append(MutantSet& into, MutantSet&& from) {
  for (auto& w : from.warnings) into.warnings.push_back(std::move(w));
  for (auto& d : from.mutants) into.mutants.push_back(std::move(d));
}

[[noreturn]] void unknown(const std::string& what, const std::string& name) {
  throw Error(ErrorKind::UnknownTarget, "unknown " + what + " '" + name + "'");
}

// Uniform integer in [0, n) from the raw 64-bit stream; identical on every platform.
std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

}  // namespace

std::string_view to_string(MutantKind kind) noexcept { return info(kind).name; }

std::string_view kind_tag(MutantKind kind) noexcept { return info(kind).tag; }

bool is_attack(MutantKind kind) noexcept { return info(kind).tag != "TR"; }

MutantKind mutant_kind_from_string(std::string_view text) {
  for (const auto& i : kKinds)
    if (i.name == text) return i.kind;
  throw Error(ErrorKind::SchemaError, "unknown mutant kind '" + std::string(text) + "'");
}

std::size_t MutantSet::count(MutantKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(mutants.begin(), mutants.end(), [&](const auto& d) { return d.kind == kind; }));
}

const MutantDescriptor* MutantSet::find(std::string_view id) const {
  for (const auto& d : mutants)
    if (d.id == id) return &d;
  return nullptr;
}

MutantSet gen_battery_drain(const Machine& m) {
  return timeout_set(m, MutantKind::BatteryDrain, profile_of(m).drain_states, kDrainTimeout);
}

MutantSet gen_sleep_deprivation(const Machine& m) {
  return timeout_set(m, MutantKind::SleepDeprivation, profile_of(m).sleep_states, kSleepTimeout);
}

MutantSet gen_increased_timeout(const Machine& m) {
  return timeout_set(m, MutantKind::IncreasedTimeout, profile_of(m).drain_states, kIncreasedTimeout);
}

MutantSet gen_data_falsification(const Machine& m) {
  const AttackProfile& p = profile_of(m);
  if (!m.def().has_output(p.falsify_output))
    throw Error(ErrorKind::UnknownTarget, "profile names unknown output '" + p.falsify_output + "'");
  MutantSet set;
  set.spec_id = m.id();
  for (const auto& id : p.falsify_transitions) {
    const TransitionDecl& t = transition_of(m, id);
    std::string out = p.falsify_output;
    if (t.output == out) {
      // Already emits the error output: substitute the first other declared output.
      auto it = std::find_if(m.def().outputs.begin(), m.def().outputs.end(),
                             [&](const OutputDecl& o) { return o.name != t.output; });
      if (it == m.def().outputs.end()) {
        set.warnings.push_back("A3: transition " + id + " already outputs " + out + "; no alternative output");
        continue;
      }
      out = it->name;
      set.warnings.push_back("A3: transition " + id + " already outputs " + p.falsify_output +
                             "; replaced with " + out + " instead");
    }
    set.mutants.push_back({numbered("A3", set.mutants.size() + 1, 2), MutantKind::DataFalsification,
                           SetOutput{id, out}});
  }
  return set;
}

MutantSet gen_replay(const Machine& m) {
  const AttackProfile& p = profile_of(m);
  MutantSet set;
  set.spec_id = m.id();
  if (!p.replay) return set;
  const TransitionDecl& src = transition_of(m, p.replay->copy_of);
  MutantDescriptor d{"A4-01", MutantKind::Replay,
                     AddTransition{next_transition_id(m.def()), p.replay->state, src.input, src.output,
                                   p.replay->state}};
  apply_edit(m.def(), d.edit);  // surfaces Conflict and UnknownTarget here
  set.mutants.push_back(std::move(d));
  return set;
}

MutantSet gen_mitm(const Machine& m) {
  const AttackProfile& p = profile_of(m);
  MutantSet set;
  set.spec_id = m.id();
  std::string name = fresh_state_name(m.def());
  for (const auto& id : p.mitm_transitions) {
    const TransitionDecl& t = transition_of(m, id);
    set.mutants.push_back({numbered("A5", set.mutants.size() + 1, 2), MutantKind::ManInTheMiddle,
                           AddState{name, id, kInterceptTimeout, t.src}});
  }
  return set;
}

std::vector<MutantKind> all_attack_kinds() {
  return {MutantKind::BatteryDrain, MutantKind::SleepDeprivation, MutantKind::DataFalsification,
          MutantKind::Replay,       MutantKind::ManInTheMiddle,   MutantKind::IncreasedTimeout};
}

MutantSet gen_attacks(const Machine& m, const std::vector<MutantKind>& kinds) {
  const AttackProfile& p = profile_of(m);
  MutantSet set;
  set.spec_id = m.id();
  for (MutantKind k : all_attack_kinds()) {
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) continue;
    MutantSet part;
    switch (k) {
      case MutantKind::BatteryDrain: part = gen_battery_drain(m); break;
      case MutantKind::SleepDeprivation: part = gen_sleep_deprivation(m); break;
      case MutantKind::DataFalsification: part = gen_data_falsification(m); break;
      case MutantKind::Replay: part = gen_replay(m); break;
      case MutantKind::ManInTheMiddle: part = gen_mitm(m); break;
      case MutantKind::IncreasedTimeout: part = gen_increased_timeout(m); break;
      default: break;
    }
    auto it = p.reported.find(std::string(kind_tag(k)));
    if (it != p.reported.end() && static_cast<std::size_t>(it->second) != part.mutants.size())
      part.warnings.push_back(std::string(kind_tag(k)) + ": generated " + std::to_string(part.mutants.size()) +
                              " mutants from the listed targets; " + std::to_string(it->second) +
                              " are reported for " + m.id());
    append(set, std::move(part));
  }
  if (kinds.size() == all_attack_kinds().size()) {
    auto it = p.reported.find("total");
    if (it != p.reported.end() && static_cast<std::size_t>(it->second) != set.mutants.size())
      set.warnings.push_back("total: generated " + std::to_string(set.mutants.size()) + " attack mutants; " +
                             std::to_string(it->second) + " are reported for " + m.id());
  }
  return set;
}

MutantSet gen_traditional(const Machine& m, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw Error(ErrorKind::InvalidArgument, "traditional mutant budget must be at least 1");
  const MachineDef& def = m.def();

  std::vector<std::string> outputs;
  for (const auto& o : def.outputs) outputs.push_back(o.name);

  std::array<std::vector<std::pair<MutantKind, Edit>>, 4> pools;
  for (const auto& t : def.transitions) {
    for (const auto& o : outputs)
      if (o != t.output) pools[0].push_back({MutantKind::OutputFault, SetOutput{t.id, o}});
    if (t.output != kEpsilon) pools[0].push_back({MutantKind::OutputFault, SetOutput{t.id, std::string(kEpsilon)}});
  }
  for (const auto& t : def.timeouts) {
    if (t.t_out == kInfinite) continue;
    for (Millis v : {t.t_out / 2, t.t_out + t.t_out / 2})
      if (v >= 1 && v != t.t_out) pools[1].push_back({MutantKind::TimeoutFault, SetTimeout{t.state, v}});
  }
  const std::string new_id = next_transition_id(def);
  for (const auto& s : def.states)
    for (const auto& in : def.inputs) {
      bool used = std::any_of(def.transitions.begin(), def.transitions.end(),
                              [&](const TransitionDecl& t) { return t.src == s.name && t.input == in.name; });
      if (used) continue;
      for (const auto& o : outputs)
        for (const auto& d : def.states)
          pools[2].push_back({MutantKind::AddedTransition, AddTransition{new_id, s.name, in.name, o, d.name}});
    }
  const std::string new_state = fresh_state_name(def);
  for (const auto& t : def.transitions) {
    const TimeoutDecl* dst = def.find_timeout(t.dst);
    Millis t_out = dst && dst->t_out != kInfinite ? dst->t_out : 1000;
    for (const auto& b : def.states)
      pools[3].push_back({MutantKind::NewState, AddState{new_state, t.id, t_out, b.name}});
  }

  std::size_t available = 0;
  for (const auto& p : pools) available += p.size();
  if (available < budget)
    throw Error(ErrorKind::Exhausted, "machine '" + m.id() + "' admits only " + std::to_string(available) +
                                          " distinct traditional mutants, " + std::to_string(budget) + " requested");

  MutantSet set;
  set.spec_id = m.id();
  set.seed = seed;
  std::mt19937_64 rng(seed);
  while (set.mutants.size() < budget) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < pools.size(); ++k)
      if (!pools[k].empty()) open.push_back(k);
    auto& pool = pools[open[draw(rng, open.size())]];
    std::size_t ix = draw(rng, pool.size());
    auto [kind, edit] = std::move(pool[ix]);
    pool[ix] = std::move(pool.back());
    pool.pop_back();
    set.mutants.push_back({numbered("TR", set.mutants.size() + 1, 3), kind, std::move(edit)});
  }
  return set;
}

MachineDef apply_edit(const MachineDef& def, const Edit& edit) {
  MachineDef out = def;
  auto require_state = [&](const std::string& s) {
    if (!out.has_state(s)) unknown("state", s);
  };

  if (const auto* e = std::get_if<SetTimeout>(&edit)) {
    TimeoutDecl* t = out.find_timeout(e->state);
    if (!t) unknown("state", e->state);
    if (t->t_out == e->t_out)
      throw Error(ErrorKind::NoOp, "state " + e->state + " already has t_out " + std::to_string(e->t_out));
    t->t_out = e->t_out;
  } else if (const auto* e = std::get_if<SetOutput>(&edit)) {
    TransitionDecl* t = out.find_transition(e->transition);
    if (!t) unknown("transition", e->transition);
    if (e->output != kEpsilon && !out.has_output(e->output)) unknown("output", e->output);
    if (t->output == e->output)
      throw Error(ErrorKind::NoOp, "transition " + e->transition + " already outputs " + e->output);
    t->output = e->output;
  } else if (const auto* e = std::get_if<AddTransition>(&edit)) {
    require_state(e->src);
    require_state(e->dst);
    if (!out.find_input(e->input)) unknown("input", e->input);
    if (e->output != kEpsilon && !out.has_output(e->output)) unknown("output", e->output);
    if (out.find_transition(e->id)) throw Error(ErrorKind::Conflict, "transition id '" + e->id + "' already exists");
    for (const auto& t : out.transitions)
      if (t.src == e->src && t.input == e->input)
        throw Error(ErrorKind::Conflict, "state " + e->src + " already defines input " + e->input +
                                             " (transition " + t.id + ")");
    out.transitions.push_back({e->id, e->src, e->input, "", {}, e->output, e->dst, false});
  } else if (const auto* e = std::get_if<AddState>(&edit)) {
    if (out.has_state(e->state)) throw Error(ErrorKind::Conflict, "state '" + e->state + "' already exists");
    TransitionDecl* t = out.find_transition(e->reroute);
    if (!t) unknown("transition", e->reroute);
    require_state(e->back);
    out.states.push_back({e->state, "", false});
    out.timeouts.push_back({e->state, e->t_out, e->back, false});
    t->dst = e->state;
  }

  ValidationReport report = validate_machine(out);
  if (!report.ok()) throw Error(ErrorKind::InvalidResult, "edit produces an invalid machine:\n" + report.to_string());
  return out;
}

Machine apply_descriptor(const Machine& m, const MutantDescriptor& d) {
  try {
    return Machine::compile(apply_edit(m.def(), d.edit));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SemanticError) throw Error(ErrorKind::InvalidResult, e.what());
    throw;
  }
}

}  // namespace tfsm
