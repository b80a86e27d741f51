#include "tfsm/machine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tfsm {

// ---------------------------------------------------------------------------
// MachineDef lookups
// ---------------------------------------------------------------------------

const TransitionDecl* MachineDef::find_transition(std::string_view tid) const {
  for (const auto& t : transitions)
    if (t.id == tid) return &t;
  return nullptr;
}

TransitionDecl* MachineDef::find_transition(std::string_view tid) {
  for (auto& t : transitions)
    if (t.id == tid) return &t;
  return nullptr;
}

const TimeoutDecl* MachineDef::find_timeout(std::string_view state) const {
  for (const auto& t : timeouts)
    if (t.state == state) return &t;
  return nullptr;
}

TimeoutDecl* MachineDef::find_timeout(std::string_view state) {
  for (auto& t : timeouts)
    if (t.state == state) return &t;
  return nullptr;
}

bool MachineDef::has_state(std::string_view name) const {
  return std::any_of(states.begin(), states.end(), [&](const auto& s) { return s.name == name; });
}

bool MachineDef::has_output(std::string_view name) const {
  return std::any_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o.name == name; });
}

const InputDecl* MachineDef::find_input(std::string_view name) const {
  for (const auto& i : inputs)
    if (i.name == name) return &i;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DanglingReference: return "dangling-reference";
    case ViolationKind::DuplicateName: return "duplicate-name";
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::ReservedName: return "reserved-name";
    case ViolationKind::TypeError: return "type-error";
    case ViolationKind::ExpressionSyntax: return "expression-syntax";
    case ViolationKind::MissingTimeout: return "missing-timeout";
    case ViolationKind::DuplicateTimeout: return "duplicate-timeout";
    case ViolationKind::InvalidTimeout: return "invalid-timeout";
    case ViolationKind::GuardOverlap: return "guard-overlap";
    case ViolationKind::EmptyMachine: return "empty-machine";
  }
  return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << tfsm::to_string(v.kind) << " at " << v.path << ": " << v.message << "\n";
  return os.str();
}

namespace {

std::string at(std::string_view list, std::size_t i, std::string_view field = {}) {
  std::string p = std::string(list) + "[" + std::to_string(i) + "]";
  if (!field.empty()) p += "." + std::string(field);
  return p;
}

Scope scope_for(const MachineDef& def, const InputDecl* input) {
  Scope scope;
  for (const auto& v : def.variables) scope.variables.push_back({v.name, v.kind});
  if (input != nullptr && input->param_kind != ValueKind::None) {
    scope.param_kind = input->param_kind;
    scope.param_name = input->param_name.empty() ? "p" : input->param_name;
  }
  return scope;
}

struct Compiled {
  ExprPtr guard;
  std::string guard_key;  // canonical guard text for overlap detection
  std::vector<std::pair<int, ExprPtr>> updates;
};

// Compiles the expressions of one transition, appending violations.
Compiled compile_transition(const MachineDef& def, std::size_t ti, const InputDecl* input,
                            std::vector<Violation>& out) {
  const auto& t = def.transitions[ti];
  Compiled c;
  Scope scope = scope_for(def, input);
  try {
    c.guard = parse_guard(t.guard, scope);
    if (c.guard && c.guard->kind == Expr::Kind::BoolLit && c.guard->int_value == 1)
      c.guard = nullptr;
    c.guard_key = c.guard ? print_expr(*c.guard) : std::string();
  } catch (const ExprError& e) {
    c.guard_key = t.guard;
    out.push_back({e.type_error() ? ViolationKind::TypeError : ViolationKind::ExpressionSyntax,
                   at("transitions", ti, "guard"), e.what()});
  }
  std::set<std::string> assigned;
  for (std::size_t ui = 0; ui < t.updates.size(); ++ui) {
    const auto& u = t.updates[ui];
    std::string path = at("transitions", ti, "updates") + "[" + std::to_string(ui) + "]";
    auto var = std::find_if(def.variables.begin(), def.variables.end(),
                            [&](const auto& v) { return v.name == u.target; });
    if (var == def.variables.end()) {
      out.push_back({ViolationKind::DanglingReference, path,
                     "assignment to undeclared variable '" + u.target + "'"});
      continue;
    }
    if (!assigned.insert(u.target).second) {
      out.push_back({ViolationKind::DuplicateName, path,
                     "variable '" + u.target + "' assigned twice in one update"});
      continue;
    }
    try {
      auto e = parse_expr(u.expr, scope);
      ExprType want = var->kind == ValueKind::String ? ExprType::String : ExprType::Int;
      if (e->type != want) {
        out.push_back({ViolationKind::TypeError, path,
                       "assignment to " + std::string(to_string(var->kind)) + " variable '" +
                           u.target + "' from expression of another type"});
        continue;
      }
      c.updates.emplace_back(static_cast<int>(var - def.variables.begin()), std::move(e));
    } catch (const ExprError& e) {
      out.push_back({e.type_error() ? ViolationKind::TypeError : ViolationKind::ExpressionSyntax,
                     path, e.what()});
    }
  }
  return c;
}

template <class Range, class Name>
void check_unique(const Range& items, std::string_view list, Name name, ViolationKind kind,
                  std::vector<Violation>& out) {
  std::set<std::string> seen;
  std::size_t i = 0;
  for (const auto& item : items) {
    if (!seen.insert(name(item)).second)
      out.push_back({kind, at(list, i, "name"), "duplicate '" + name(item) + "'"});
    ++i;
  }
}

std::vector<Violation> check(const MachineDef& def, std::vector<Compiled>* compiled) {
  std::vector<Violation> out;
  if (def.states.empty()) out.push_back({ViolationKind::EmptyMachine, "states", "no states"});

  auto by_name = [](const auto& x) { return x.name; };
  check_unique(def.states, "states", by_name, ViolationKind::DuplicateName, out);
  check_unique(def.inputs, "inputs", by_name, ViolationKind::DuplicateName, out);
  check_unique(def.outputs, "outputs", by_name, ViolationKind::DuplicateName, out);
  check_unique(def.variables, "variables", by_name, ViolationKind::DuplicateName, out);
  check_unique(def.transitions, "transitions", [](const auto& t) { return t.id; },
               ViolationKind::DuplicateId, out);

  for (std::size_t i = 0; i < def.outputs.size(); ++i)
    if (def.outputs[i].name == kEpsilon)
      out.push_back({ViolationKind::ReservedName, at("outputs", i, "name"),
                     "'eps' is the implicit empty output and cannot be declared"});

  if (!def.states.empty() && !def.has_state(def.initial))
    out.push_back({ViolationKind::DanglingReference, "initial",
                   "initial state '" + def.initial + "' is not declared"});

  for (std::size_t i = 0; i < def.variables.size(); ++i) {
    const auto& v = def.variables[i];
    if (v.kind == ValueKind::None)
      out.push_back({ViolationKind::TypeError, at("variables", i, "kind"),
                     "variables must be int or string"});
    else if (kind_of(v.initial) != v.kind)
      out.push_back({ViolationKind::TypeError, at("variables", i, "init"),
                     "initial value does not match declared kind"});
  }

  for (std::size_t i = 0; i < def.inputs.size(); ++i) {
    const auto& in = def.inputs[i];
    if (in.param_kind == ValueKind::None && !in.param_name.empty())
      out.push_back({ViolationKind::TypeError, at("inputs", i, "param"),
                     "parameter name given for an input without parameter"});
  }

  std::set<std::string> timed;
  for (std::size_t i = 0; i < def.timeouts.size(); ++i) {
    const auto& t = def.timeouts[i];
    if (!def.has_state(t.state))
      out.push_back({ViolationKind::DanglingReference, at("timeouts", i, "state"),
                     "unknown state '" + t.state + "'"});
    else if (!timed.insert(t.state).second)
      out.push_back({ViolationKind::DuplicateTimeout, at("timeouts", i, "state"),
                     "second timeout entry for '" + t.state + "'"});
    if (!def.has_state(t.dst))
      out.push_back({ViolationKind::DanglingReference, at("timeouts", i, "dst"),
                     "unknown state '" + t.dst + "'"});
    if (t.t_out != kInfinite && t.t_out <= 0)
      out.push_back({ViolationKind::InvalidTimeout, at("timeouts", i, "t_out"),
                     "finite timeouts must be positive"});
  }
  for (std::size_t i = 0; i < def.states.size(); ++i)
    if (!timed.count(def.states[i].name))
      out.push_back({ViolationKind::MissingTimeout, at("states", i),
                     "state '" + def.states[i].name + "' has no timeout entry"});

  std::vector<Compiled> local;
  for (std::size_t i = 0; i < def.transitions.size(); ++i) {
    const auto& t = def.transitions[i];
    if (!def.has_state(t.src))
      out.push_back({ViolationKind::DanglingReference, at("transitions", i, "src"),
                     "unknown state '" + t.src + "'"});
    if (!def.has_state(t.dst))
      out.push_back({ViolationKind::DanglingReference, at("transitions", i, "dst"),
                     "unknown state '" + t.dst + "'"});
    const InputDecl* input = def.find_input(t.input);
    if (input == nullptr)
      out.push_back({ViolationKind::DanglingReference, at("transitions", i, "input"),
                     "unknown input '" + t.input + "'"});
    if (t.output != kEpsilon && !def.has_output(t.output))
      out.push_back({ViolationKind::DanglingReference, at("transitions", i, "output"),
                     "unknown output '" + t.output + "'"});
    local.push_back(compile_transition(def, i, input, out));
  }

  // Static overlap: identical guard text on the same (state, input).
  for (std::size_t i = 0; i < def.transitions.size(); ++i) {
    for (std::size_t j = i + 1; j < def.transitions.size(); ++j) {
      const auto& a = def.transitions[i];
      const auto& b = def.transitions[j];
      if (a.src != b.src || a.input != b.input) continue;
      if (local[i].guard_key == local[j].guard_key)
        out.push_back({ViolationKind::GuardOverlap, at("transitions", j, "guard"),
                       "transitions '" + a.id + "' and '" + b.id + "' on (" + a.src + ", " +
                           a.input + ") have identical guards"});
    }
  }

  if (def.profile) {
    const auto& p = *def.profile;
    auto state_ref = [&](const std::string& s, const std::string& path) {
      if (!def.has_state(s))
        out.push_back({ViolationKind::DanglingReference, path, "unknown state '" + s + "'"});
    };
    auto trans_ref = [&](const std::string& t, const std::string& path) {
      if (!def.find_transition(t))
        out.push_back({ViolationKind::DanglingReference, path, "unknown transition '" + t + "'"});
    };
    for (std::size_t i = 0; i < p.drain_states.size(); ++i)
      state_ref(p.drain_states[i], at("profile.drain_states", i));
    for (std::size_t i = 0; i < p.sleep_states.size(); ++i)
      state_ref(p.sleep_states[i], at("profile.sleep_states", i));
    for (std::size_t i = 0; i < p.falsify_transitions.size(); ++i)
      trans_ref(p.falsify_transitions[i], at("profile.falsify_transitions", i));
    for (std::size_t i = 0; i < p.mitm_transitions.size(); ++i)
      trans_ref(p.mitm_transitions[i], at("profile.mitm_transitions", i));
    if (!def.has_output(p.falsify_output))
      out.push_back({ViolationKind::DanglingReference, "profile.falsify_output",
                     "unknown output '" + p.falsify_output + "'"});
    if (p.replay) {
      state_ref(p.replay->state, "profile.replay.state");
      trans_ref(p.replay->copy_of, "profile.replay.copy_of");
    }
  }
  if (compiled) *compiled = std::move(local);
  return out;
}

}  // namespace

ValidationReport validate_machine(const MachineDef& def) {
  return ValidationReport{check(def, nullptr)};
}

Machine Machine::compile(MachineDef def) {
  std::vector<Compiled> compiled;
  auto violations = check(def, &compiled);
  if (!violations.empty())
    throw Error(ErrorKind::SemanticError,
                "machine '" + def.id + "' is invalid:\n" + ValidationReport{violations}.to_string());

  Machine m;
  // Canonical expression text and parameter names.
  for (auto& in : def.inputs)
    if (in.param_kind != ValueKind::None && in.param_name.empty()) in.param_name = "p";
  for (std::size_t i = 0; i < def.transitions.size(); ++i) {
    auto& t = def.transitions[i];
    t.guard = compiled[i].guard ? print_expr(*compiled[i].guard) : std::string();
    for (std::size_t u = 0; u < t.updates.size(); ++u)
      t.updates[u].expr = print_expr(*compiled[i].updates[u].second);
  }
  // Timeout entries follow state declaration order.
  std::vector<TimeoutDecl> ordered;
  for (const auto& s : def.states) ordered.push_back(*def.find_timeout(s.name));
  def.timeouts = std::move(ordered);

  m.def_ = std::move(def);
  const auto& d = m.def_;
  for (std::size_t i = 0; i < d.states.size(); ++i) m.state_ix_[d.states[i].name] = int(i);
  for (std::size_t i = 0; i < d.inputs.size(); ++i) m.input_ix_[d.inputs[i].name] = int(i);
  for (std::size_t i = 0; i < d.outputs.size(); ++i) m.output_ix_[d.outputs[i].name] = int(i);
  for (std::size_t i = 0; i < d.variables.size(); ++i) m.var_ix_[d.variables[i].name] = int(i);
  m.initial_ = m.state_ix_.at(d.initial);

  m.timeout_.resize(d.states.size());
  m.timeout_dst_.resize(d.states.size());
  for (const auto& t : d.timeouts) {
    int s = m.state_ix_.at(t.state);
    m.timeout_[s] = t.t_out;
    m.timeout_dst_[s] = m.state_ix_.at(t.dst);
  }

  for (std::size_t i = 0; i < d.transitions.size(); ++i) {
    const auto& t = d.transitions[i];
    Transition ct;
    ct.src = m.state_ix_.at(t.src);
    ct.dst = m.state_ix_.at(t.dst);
    ct.input = m.input_ix_.at(t.input);
    ct.output = t.output == kEpsilon ? kEpsilonId : m.output_ix_.at(t.output);
    ct.guard = compiled[i].guard;
    ct.updates = std::move(compiled[i].updates);
    ct.decl = static_cast<int>(i);
    m.transitions_.push_back(std::move(ct));
  }

  const std::size_t ni = d.inputs.size();
  m.dispatch_.assign(d.states.size() * ni, {0, 0});
  std::vector<std::vector<int>> buckets(d.states.size() * ni);
  for (std::size_t i = 0; i < m.transitions_.size(); ++i) {
    const auto& t = m.transitions_[i];
    buckets[t.src * ni + t.input].push_back(static_cast<int>(i));
  }
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    int begin = static_cast<int>(m.dispatch_list_.size());
    m.dispatch_list_.insert(m.dispatch_list_.end(), buckets[b].begin(), buckets[b].end());
    m.dispatch_[b] = {begin, static_cast<int>(m.dispatch_list_.size())};
  }
  return m;
}

int Machine::state_index(std::string_view name) const {
  auto it = state_ix_.find(std::string(name));
  return it == state_ix_.end() ? -1 : it->second;
}

int Machine::input_index(std::string_view name) const {
  auto it = input_ix_.find(std::string(name));
  return it == input_ix_.end() ? -1 : it->second;
}

int Machine::output_index(std::string_view name) const {
  if (name == kEpsilon) return kEpsilonId;
  auto it = output_ix_.find(std::string(name));
  return it == output_ix_.end() ? -2 : it->second;
}

int Machine::variable_index(std::string_view name) const {
  auto it = var_ix_.find(std::string(name));
  return it == var_ix_.end() ? -1 : it->second;
}

std::string_view Machine::output_name(int o) const {
  if (o == kEpsilonId) return kEpsilon;
  return def_.outputs[o].name;
}

std::span<const int> Machine::transitions_from(int state, int input) const {
  auto [b, e] = dispatch_[static_cast<std::size_t>(state) * def_.inputs.size() + input];
  return std::span<const int>(dispatch_list_.data() + b, static_cast<std::size_t>(e - b));
}

std::vector<Value> Machine::initial_env() const {
  std::vector<Value> env;
  env.reserve(def_.variables.size());
  for (const auto& v : def_.variables) env.push_back(v.initial);
  return env;
}

std::vector<Value> Machine::literals() const {
  std::vector<Value> out;
  for (const auto& t : transitions_) {
    if (t.guard) collect_literals(*t.guard, out);
    for (const auto& [slot, e] : t.updates) collect_literals(*e, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tfsm
