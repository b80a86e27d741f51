#include "tfsm/format.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace tfsm {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::SchemaError, (path.empty() ? std::string("document") : path) + ": " + message);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    // nlohmann prefixes "[json.exception.parse_error.101] parse error at line L, column C: ".
    if (auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
}

std::string kind_name(const json& j) {
  if (j.is_string()) return "string";
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  if (j.is_boolean()) return "boolean";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

// Field access over one JSON object; rejects keys never read.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_fail(path_, "expected object, got " + kind_name(j_));
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json& get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    if (it == j_.end()) schema_fail(field(key), "missing required field");
    return *it;
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  std::string str(std::string_view key) { return as_string(get(key), field(key)); }

  std::string str_or(std::string_view key, std::string fallback) {
    const json* v = find(key);
    return v ? as_string(*v, field(key)) : fallback;
  }

  std::int64_t integer(std::string_view key) { return as_int(get(key), field(key)); }

  bool boolean_or(std::string_view key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) schema_fail(field(key), "expected boolean, got " + kind_name(*v));
    return v->get<bool>();
  }

  const json& array(std::string_view key) {
    const json& v = get(key);
    if (!v.is_array()) schema_fail(field(key), "expected array, got " + kind_name(v));
    return v;
  }

  const json* array_opt(std::string_view key) {
    const json* v = find(key);
    if (v && !v->is_array()) schema_fail(field(key), "expected array, got " + kind_name(*v));
    return v;
  }

  std::vector<std::string> strings_or_empty(std::string_view key) {
    std::vector<std::string> out;
    if (const json* a = array_opt(key))
      for (std::size_t i = 0; i < a->size(); ++i)
        out.push_back(as_string((*a)[i], field(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) schema_fail(field(key), "unknown field");
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_fail(path, "expected string, got " + kind_name(v));
    return v.get<std::string>();
  }

  static std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_fail(path, "expected integer, got " + kind_name(v));
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
      schema_fail(path, "integer out of range");
    return v.get<std::int64_t>();
  }

  static Value as_value(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    return as_int(v, path);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string item(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void check_header(Reader& r, std::string_view kind) {
  std::string schema = r.str("schema");
  if (schema != kSchemaVersion)
    schema_fail(r.field("schema"), "unsupported schema '" + schema + "', expected '" +
                                       std::string(kSchemaVersion) + "'");
  if (!kind.empty()) {
    std::string k = r.str("kind");
    if (k != kind) schema_fail(r.field("kind"), "expected '" + std::string(kind) + "', got '" + k + "'");
  }
}

json value_json(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

ValueKind kind_field(Reader& r, std::string_view key, ValueKind fallback) {
  const json* v = r.find(key);
  if (!v) return fallback;
  std::string text = Reader::as_string(*v, r.field(key));
  try {
    return value_kind_from_string(text);
  } catch (const Error&) {
    schema_fail(r.field(key), "unknown value kind '" + text + "' (expected none, int or string)");
  }
}

AttackProfile read_profile(const json& j, const std::string& path) {
  Reader r(j, path);
  AttackProfile p;
  p.drain_states = r.strings_or_empty("drain_states");
  p.sleep_states = r.strings_or_empty("sleep_states");
  p.falsify_transitions = r.strings_or_empty("falsify_transitions");
  p.falsify_output = r.str_or("falsify_output", "o6");
  if (const json* rep = r.find("replay")) {
    Reader rr(*rep, r.field("replay"));
    p.replay = ReplayTarget{rr.str("state"), rr.str("copy_of")};
    rr.finish();
  }
  p.mitm_transitions = r.strings_or_empty("mitm_transitions");
  if (const json* rep = r.find("reported")) {
    if (!rep->is_object()) schema_fail(r.field("reported"), "expected object, got " + kind_name(*rep));
    for (const auto& [k, v] : rep->items())
      p.reported[k] = static_cast<int>(Reader::as_int(v, r.field("reported") + "." + k));
  }
  r.finish();
  return p;
}

json write_profile(const AttackProfile& p) {
  json j = json::object();
  j["drain_states"] = p.drain_states;
  j["sleep_states"] = p.sleep_states;
  j["falsify_transitions"] = p.falsify_transitions;
  j["falsify_output"] = p.falsify_output;
  if (p.replay) j["replay"] = {{"state", p.replay->state}, {"copy_of", p.replay->copy_of}};
  j["mitm_transitions"] = p.mitm_transitions;
  if (!p.reported.empty()) {
    json rep = json::object();
    for (const auto& [k, v] : p.reported) rep[k] = v;
    j["reported"] = rep;
  }
  return j;
}

MachineDef read_machine(const json& j, const std::string& path) {
  Reader r(j, path);
  MachineDef def;
  def.id = r.str("id");
  def.initial = r.str("initial");

  const json& states = r.array("states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    Reader s(states[i], item(r.field("states"), i));
    def.states.push_back({s.str("name"), s.str_or("label", ""), s.boolean_or("reconstructed", false)});
    s.finish();
  }

  const json& inputs = r.array("inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Reader s(inputs[i], item(r.field("inputs"), i));
    InputDecl in;
    in.name = s.str("name");
    in.param_kind = kind_field(s, "param_kind", ValueKind::None);
    in.param_name = s.str_or("param_name", "");
    in.label = s.str_or("label", "");
    in.reconstructed = s.boolean_or("reconstructed", false);
    s.finish();
    def.inputs.push_back(std::move(in));
  }

  const json& outputs = r.array("outputs");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    Reader s(outputs[i], item(r.field("outputs"), i));
    def.outputs.push_back({s.str("name"), s.str_or("label", ""), s.boolean_or("reconstructed", false)});
    s.finish();
  }

  if (const json* vars = r.array_opt("variables")) {
    for (std::size_t i = 0; i < vars->size(); ++i) {
      std::string at = item(r.field("variables"), i);
      Reader s((*vars)[i], at);
      VariableDecl v;
      v.name = s.str("name");
      v.kind = kind_field(s, "kind", ValueKind::Int);
      if (v.kind == ValueKind::None) schema_fail(s.field("kind"), "variables must be int or string");
      v.initial = Reader::as_value(s.get("init"), s.field("init"));
      if (kind_of(v.initial) != v.kind)
        schema_fail(s.field("init"), "initial value does not match kind " + std::string(to_string(v.kind)));
      s.finish();
      def.variables.push_back(std::move(v));
    }
  }

  const json& timeouts = r.array("timeouts");
  for (std::size_t i = 0; i < timeouts.size(); ++i) {
    Reader s(timeouts[i], item(r.field("timeouts"), i));
    TimeoutDecl t;
    t.state = s.str("state");
    const json& tv = s.get("t_out");
    if (tv.is_string()) {
      if (tv.get<std::string>() != "INFINITE") schema_fail(s.field("t_out"), "expected integer or \"INFINITE\"");
      t.t_out = kInfinite;
    } else {
      t.t_out = Reader::as_int(tv, s.field("t_out"));
    }
    t.dst = s.str_or("dst", t.t_out == kInfinite ? t.state : "");
    if (t.dst.empty()) schema_fail(s.field("dst"), "missing required field");
    t.reconstructed = s.boolean_or("reconstructed", false);
    s.finish();
    def.timeouts.push_back(std::move(t));
  }

  if (const json* trs = r.array_opt("transitions")) {
    for (std::size_t i = 0; i < trs->size(); ++i) {
      Reader s((*trs)[i], item(r.field("transitions"), i));
      TransitionDecl t;
      t.id = s.str("id");
      t.src = s.str("src");
      t.input = s.str("input");
      t.guard = s.str_or("guard", "");
      for (std::size_t k = 0; const auto& u : s.strings_or_empty("updates")) {
        auto pos = u.find(":=");
        std::string upath = item(s.field("updates"), k++);
        if (pos == std::string::npos) schema_fail(upath, "expected 'variable := expression'");
        auto trim = [](std::string x) {
          auto b = x.find_first_not_of(" \t");
          auto e = x.find_last_not_of(" \t");
          return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
        };
        Assignment a{trim(u.substr(0, pos)), trim(u.substr(pos + 2))};
        if (a.target.empty() || a.expr.empty()) schema_fail(upath, "expected 'variable := expression'");
        t.updates.push_back(std::move(a));
      }
      t.output = s.str("output");
      t.dst = s.str("dst");
      t.reconstructed = s.boolean_or("reconstructed", false);
      s.finish();
      def.transitions.push_back(std::move(t));
    }
  }

  if (const json* p = r.find("profile")) def.profile = read_profile(*p, r.field("profile"));
  r.finish();
  return def;
}

json write_machine(const MachineDef& def) {
  json m = json::object();
  m["id"] = def.id;
  m["initial"] = def.initial;
  json states = json::array();
  for (const auto& s : def.states) {
    json o = {{"name", s.name}};
    if (!s.label.empty()) o["label"] = s.label;
    if (s.reconstructed) o["reconstructed"] = true;
    states.push_back(std::move(o));
  }
  m["states"] = std::move(states);

  json inputs = json::array();
  for (const auto& in : def.inputs) {
    json o = {{"name", in.name}};
    if (in.param_kind != ValueKind::None) o["param_kind"] = std::string(to_string(in.param_kind));
    if (!in.param_name.empty()) o["param_name"] = in.param_name;
    if (!in.label.empty()) o["label"] = in.label;
    if (in.reconstructed) o["reconstructed"] = true;
    inputs.push_back(std::move(o));
  }
  m["inputs"] = std::move(inputs);

  json outputs = json::array();
  for (const auto& o : def.outputs) {
    json x = {{"name", o.name}};
    if (!o.label.empty()) x["label"] = o.label;
    if (o.reconstructed) x["reconstructed"] = true;
    outputs.push_back(std::move(x));
  }
  m["outputs"] = std::move(outputs);

  json vars = json::array();
  for (const auto& v : def.variables)
    vars.push_back({{"name", v.name}, {"kind", std::string(to_string(v.kind))}, {"init", value_json(v.initial)}});
  m["variables"] = std::move(vars);

  json timeouts = json::array();
  for (const auto& t : def.timeouts) {
    json o = {{"state", t.state}, {"dst", t.dst}};
    o["t_out"] = t.t_out == kInfinite ? json("INFINITE") : json(t.t_out);
    if (t.reconstructed) o["reconstructed"] = true;
    timeouts.push_back(std::move(o));
  }
  m["timeouts"] = std::move(timeouts);

  json trs = json::array();
  for (const auto& t : def.transitions) {
    json o = {{"id", t.id}, {"src", t.src}, {"input", t.input}, {"output", t.output}, {"dst", t.dst}};
    if (!t.guard.empty()) o["guard"] = t.guard;
    if (!t.updates.empty()) {
      json ups = json::array();
      for (const auto& a : t.updates) ups.push_back(a.target + " := " + a.expr);
      o["updates"] = std::move(ups);
    }
    if (t.reconstructed) o["reconstructed"] = true;
    trs.push_back(std::move(o));
  }
  m["transitions"] = std::move(trs);
  if (def.profile) m["profile"] = write_profile(*def.profile);
  return m;
}

// ---------------------------------------------------------------------------
// suites and verdicts
// ---------------------------------------------------------------------------

TestCase read_test(const json& j, const std::string& path) {
  Reader r(j, path);
  TestCase t;
  t.id = r.str("id");
  t.target = r.str_or("target", "");
  const json& steps = r.array("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Reader s(steps[i], item(r.field("steps"), i));
    TestStep st;
    st.input = s.str("input");
    if (const json* p = s.find("param")) st.param = Reader::as_value(*p, s.field("param"));
    st.at = s.integer("at");
    if (st.at < 0) schema_fail(s.field("at"), "timestamps must be non-negative");
    if (!t.steps.empty() && st.at <= t.steps.back().at)
      schema_fail(s.field("at"), "timestamps must be strictly increasing");
    st.expect = s.str("expect");
    s.finish();
    t.steps.push_back(std::move(st));
  }
  r.finish();
  return t;
}

json write_test(const TestCase& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json o = {{"input", s.input}, {"at", s.at}, {"expect", s.expect}};
    if (s.param) o["param"] = value_json(*s.param);
    steps.push_back(std::move(o));
  }
  json o = {{"id", t.id}, {"steps", std::move(steps)}};
  if (!t.target.empty()) o["target"] = t.target;
  return o;
}

Verdict read_verdict(Reader& r) {
  Verdict v;
  v.outcome = outcome_from_string(r.str("verdict"));
  for (auto& s : r.strings_or_empty("observed")) v.observed.push_back(std::move(s));
  if (const json* d = r.find("divergence_index")) {
    std::int64_t ix = Reader::as_int(*d, r.field("divergence_index"));
    if (ix < 0) schema_fail(r.field("divergence_index"), "must be non-negative");
    v.divergence_index = static_cast<std::size_t>(ix);
  }
  v.error = r.str_or("error", "");
  if ((v.outcome == Outcome::Kill) != v.divergence_index.has_value())
    schema_fail(r.field("divergence_index"), "present if and only if the verdict is KILL");
  return v;
}

// ---------------------------------------------------------------------------
// mutants
// ---------------------------------------------------------------------------

Edit read_edit(const json& j, const std::string& path) {
  Reader r(j, path);
  std::string op = r.str("op");
  Edit e;
  if (op == "SetTimeout") {
    e = SetTimeout{r.str("state"), r.integer("t_out")};
  } else if (op == "SetOutput") {
    e = SetOutput{r.str("transition"), r.str("output")};
  } else if (op == "AddTransition") {
    e = AddTransition{r.str("id"), r.str("src"), r.str("input"), r.str("output"), r.str("dst")};
  } else if (op == "AddState") {
    e = AddState{r.str("state"), r.str("reroute"), r.integer("t_out"), r.str("back")};
  } else {
    schema_fail(r.field("op"), "unknown edit '" + op + "'");
  }
  r.finish();
  return e;
}

json write_edit(const Edit& e) {
  struct V {
    json operator()(const SetTimeout& x) const {
      return {{"op", "SetTimeout"}, {"state", x.state}, {"t_out", x.t_out}};
    }
    json operator()(const SetOutput& x) const {
      return {{"op", "SetOutput"}, {"transition", x.transition}, {"output", x.output}};
    }
    json operator()(const AddTransition& x) const {
      return {{"op", "AddTransition"}, {"id", x.id}, {"src", x.src}, {"input", x.input},
              {"output", x.output}, {"dst", x.dst}};
    }
    json operator()(const AddState& x) const {
      return {{"op", "AddState"}, {"state", x.state}, {"reroute", x.reroute}, {"t_out", x.t_out},
              {"back", x.back}};
    }
  };
  return std::visit(V{}, e);
}

MutantDescriptor read_descriptor(const json& j, const std::string& path) {
  Reader r(j, path);
  MutantDescriptor d;
  d.id = r.str("id");
  std::string kind = r.str("kind");
  try {
    d.kind = mutant_kind_from_string(kind);
  } catch (const Error&) {
    schema_fail(r.field("kind"), "unknown mutant kind '" + kind + "'");
  }
  d.edit = read_edit(r.get("edit"), r.field("edit"));
  r.finish();
  return d;
}

json write_descriptor(const MutantDescriptor& d) {
  return {{"id", d.id}, {"kind", std::string(to_string(d.kind))}, {"edit", write_edit(d.edit)}};
}

}  // namespace

// ---------------------------------------------------------------------------

MachineDef parse_model_def(std::string_view text) {
  json j = parse_json(text);
  Reader r(j, "");
  check_header(r, "");
  if (const json* k = r.find("kind"); k && (!k->is_string() || k->get<std::string>() != "model"))
    schema_fail("kind", "expected 'model'");
  MachineDef def = read_machine(r.get("machine"), "machine");
  r.finish();
  return def;
}

Machine parse_model(std::string_view text) {
  MachineDef def = parse_model_def(text);
  ValidationReport report = validate_machine(def);
  // Ill-typed guards and updates are document kind errors rather than
  // structural ones.
  for (const auto& v : report.violations)
    if (v.kind == ViolationKind::TypeError)
      throw Error(ErrorKind::SchemaError, "machine." + v.path + ": type error: " + v.message);
  if (!report.ok()) throw Error(ErrorKind::SemanticError, "invalid machine:\n" + report.to_string());
  return Machine::compile(std::move(def));
}

std::string serialize_model(const MachineDef& def) {
  json j = {{"schema", kSchemaVersion}, {"kind", "model"}, {"machine", write_machine(def)}};
  return dump(j);
}

Suite parse_suite(std::string_view text) {
  json j = parse_json(text);
  Reader r(j, "");
  check_header(r, "suite");
  Suite s;
  s.suite_id = r.str("suite_id");
  s.spec_id = r.str("spec_id");
  const json& tests = r.array("tests");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    s.tests.push_back(read_test(tests[i], item("tests", i)));
    if (!ids.insert(s.tests.back().id).second)
      schema_fail(item("tests", i) + ".id", "duplicate test id '" + s.tests.back().id + "'");
  }
  r.finish();
  return s;
}

std::string serialize_suite(const Suite& suite) {
  json tests = json::array();
  for (const auto& t : suite.tests) tests.push_back(write_test(t));
  json j = {{"schema", kSchemaVersion}, {"kind", "suite"}, {"suite_id", suite.suite_id},
            {"spec_id", suite.spec_id}, {"tests", std::move(tests)}};
  return dump(j);
}

VerdictReport parse_verdicts(std::string_view text) {
  json j = parse_json(text);
  Reader r(j, "");
  check_header(r, "verdicts");
  VerdictReport v;
  v.suite_id = r.str("suite_id");
  const json& targets = r.array("targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Reader t(targets[i], item("targets", i));
    TargetRef ref{t.str("id"), t.str("role")};
    if (ref.role != "spec" && ref.role != "mutant")
      schema_fail(t.field("role"), "expected 'spec' or 'mutant'");
    t.finish();
    v.targets.push_back(std::move(ref));
  }
  const json& rows = r.array("rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Reader row(rows[i], item("rows", i));
    VerdictRow vr;
    vr.test = row.str("test");
    vr.target = row.str("target");
    vr.verdict = read_verdict(row);
    row.finish();
    v.rows.push_back(std::move(vr));
  }
  r.finish();
  return v;
}

std::string serialize_verdicts(const VerdictReport& report) {
  json targets = json::array();
  for (const auto& t : report.targets) targets.push_back({{"id", t.id}, {"role", t.role}});
  json rows = json::array();
  for (const auto& r : report.rows) {
    json o = {{"test", r.test}, {"target", r.target}, {"observed", r.verdict.observed},
              {"verdict", std::string(to_string(r.verdict.outcome))}};
    if (r.verdict.divergence_index) o["divergence_index"] = *r.verdict.divergence_index;
    if (!r.verdict.error.empty()) o["error"] = r.verdict.error;
    rows.push_back(std::move(o));
  }
  json j = {{"schema", kSchemaVersion}, {"kind", "verdicts"}, {"suite_id", report.suite_id},
            {"targets", std::move(targets)}, {"rows", std::move(rows)}};
  return dump(j);
}

MutantSet parse_mutants(std::string_view text) {
  json j = parse_json(text);
  Reader r(j, "");
  check_header(r, "mutants");
  MutantSet set;
  set.spec_id = r.str("spec_id");
  if (const json* s = r.find("seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0))
      schema_fail("seed", "expected non-negative integer");
    set.seed = s->get<std::uint64_t>();
  }
  set.warnings = r.strings_or_empty("warnings");
  const json& ms = r.array("mutants");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    set.mutants.push_back(read_descriptor(ms[i], item("mutants", i)));
    if (!ids.insert(set.mutants.back().id).second)
      schema_fail(item("mutants", i) + ".id", "duplicate mutant id '" + set.mutants.back().id + "'");
  }
  r.finish();
  return set;
}

std::string serialize_mutants(const MutantSet& set) {
  json ms = json::array();
  for (const auto& d : set.mutants) ms.push_back(write_descriptor(d));
  json j = {{"schema", kSchemaVersion}, {"kind", "mutants"}, {"spec_id", set.spec_id},
            {"warnings", set.warnings}, {"mutants", std::move(ms)}};
  if (set.seed) j["seed"] = *set.seed;
  return dump(j);
}

MutantDescriptor parse_descriptor(std::string_view text) {
  json j = parse_json(text);
  return read_descriptor(j, "");
}

std::string serialize_descriptor(const MutantDescriptor& d) { return write_descriptor(d).dump(); }

}  // namespace tfsm
