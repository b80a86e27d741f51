#include "tfsm/testgen.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_set>

namespace tfsm {

namespace {

std::vector<int> map_inputs(const Machine& spec, const Machine& mutant) {
  bool same = spec.input_count() == mutant.input_count();
  std::vector<int> map(spec.input_count(), -1);
  for (int i = 0; same && i < spec.input_count(); ++i) {
    int j = mutant.input_index(spec.input(i).name);
    same = j >= 0 && mutant.input(j).param_kind == spec.input(i).param_kind;
    map[i] = j;
  }
  if (!same)
    throw Error(ErrorKind::AlphabetMismatch,
                "machines '" + spec.id() + "' and '" + mutant.id() + "' have different input alphabets");
  return map;
}

Millis deadline(const Machine& m, const Configuration& c) {
  Millis t = m.timeout(c.state);
  return t == kInfinite ? kInfinite : c.now + (t - c.clock);
}

void append_config(std::string& key, const Machine& m, const Configuration& c) {
  auto put = [&](std::int64_t v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(c.state);
  put(m.timeout(c.state) == kInfinite ? 0 : c.clock);
  for (const auto& v : c.env) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      key.push_back('i');
      put(*i);
    } else {
      const auto& s = std::get<std::string>(v);
      key.push_back('s');
      put(static_cast<std::int64_t>(s.size()));
      key += s;
    }
  }
}

std::string test_id(std::size_t n, std::size_t total) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%0*zu", total > 99 ? 3 : 2, n);
  return buf;
}

}  // namespace

std::vector<std::vector<std::optional<Value>>> default_param_pool(const Machine& spec, const Machine& mutant,
                                                                  const SearchConfig& cfg) {
  std::set<std::int64_t> ints{0, 1};
  std::set<std::string> strings;
  for (const Machine* m : {&spec, &mutant})
    for (const auto& v : m->literals()) {
      if (const auto* i = std::get_if<std::int64_t>(&v)) {
        ints.insert({*i - 1, *i, *i + 1});
      } else if (!std::get<std::string>(v).empty()) {
        strings.insert(std::get<std::string>(v));
      }
    }
  for (std::string c : {"a", "b", "c", "x", "z", "0", "9"})
    if (!strings.count(c)) {
      strings.insert(c);
      break;
    }

  std::vector<std::vector<std::optional<Value>>> pool(spec.input_count());
  for (int i = 0; i < spec.input_count(); ++i) {
    const InputDecl& in = spec.input(i);
    auto& out = pool[i];
    if (auto it = cfg.param_pool.find(in.name); it != cfg.param_pool.end()) {
      for (const auto& v : it->second) {
        if (kind_of(v) != in.param_kind)
          throw Error(ErrorKind::InvalidArgument, "parameter pool for '" + in.name + "' has a value of the wrong kind");
        out.emplace_back(v);
      }
      if (in.param_kind == ValueKind::None) out = {std::nullopt};
      if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty parameter pool for '" + in.name + "'");
      continue;
    }
    switch (in.param_kind) {
      case ValueKind::None: out.emplace_back(std::nullopt); break;
      case ValueKind::Int:
        for (auto v : ints) out.emplace_back(Value{v});
        break;
      case ValueKind::String:
        for (const auto& s : strings) out.emplace_back(Value{s});
        break;
    }
  }
  return pool;
}

SearchResult distinguish(const Machine& spec, const Machine& mutant, const SearchConfig& cfg) {
  const std::vector<int> minput = map_inputs(spec, mutant);
  const auto pool = default_param_pool(spec, mutant, cfg);

  struct Node {
    Configuration s, m;
    bool fresh = true;  // an input may still arrive at the current instant
    int parent = -1;
    int input = -1;  // -1 for a wait
    int param = 0;
    Millis at = 0;
    int spec_out = kEpsilonId;
  };

  SearchResult result;
  std::vector<Node> nodes;
  std::unordered_set<std::string> seen;
  auto key_of = [&](const Node& n) {
    std::string key(1, n.fresh ? 'F' : 'S');
    append_config(key, spec, n.s);
    key.push_back('|');
    append_config(key, mutant, n.m);
    return key;
  };
  auto admit = [&](Node&& n, std::vector<int>& layer) {
    if (!seen.insert(key_of(n)).second) return;
    nodes.push_back(std::move(n));
    layer.push_back(static_cast<int>(nodes.size()) - 1);
  };
  auto build = [&](int leaf) {
    std::vector<int> chain;
    for (int n = leaf; n >= 0; n = nodes[n].parent)
      if (nodes[n].input >= 0) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    TestCase t;
    t.target = mutant.id();
    for (int n : chain) {
      const Node& x = nodes[n];
      t.steps.push_back({spec.input(x.input).name, pool[x.input][x.param], x.at,
                         std::string(spec.output_name(x.spec_out))});
    }
    return t;
  };

  std::vector<int> layer;
  {
    Node root;
    root.s = initial_configuration(spec);
    root.m = initial_configuration(mutant);
    admit(std::move(root), layer);
  }

  for (int depth = 0; !layer.empty(); ++depth) {
    std::vector<int> next;
    for (std::size_t k = 0; k < layer.size(); ++k) {
      if (nodes.size() > cfg.node_budget) {
        result.budget_exhausted = true;
        result.nodes = nodes.size();
        return result;
      }
      const int id = layer[k];
      const Millis now = nodes[id].s.now;
      const Millis event = std::min(deadline(spec, nodes[id].s), deadline(mutant, nodes[id].m));

      if (event != kInfinite) {
        Node w;
        w.s = nodes[id].s;
        w.m = nodes[id].m;
        fast::advance(spec, w.s, event);
        fast::advance(mutant, w.m, event);
        w.parent = id;
        admit(std::move(w), layer);  // same layer: waits are free
      }
      if (depth >= cfg.max_steps) continue;

      const Millis lo = nodes[id].fresh ? 0 : 1;
      std::vector<Millis> offsets;
      if (event == kInfinite) {
        offsets = {lo};
      } else {
        const Millis hi = event - now - 1;
        if (hi >= lo) offsets = {lo, lo + (hi - lo + 1) / 2, hi};
        offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
      }

      for (int i = 0; i < spec.input_count(); ++i) {
        for (int p = 0; p < static_cast<int>(pool[i].size()); ++p) {
          const Value* param = pool[i][p] ? &*pool[i][p] : nullptr;
          for (Millis off : offsets) {
            Node c;
            c.s = nodes[id].s;
            c.m = nodes[id].m;
            c.fresh = false;
            c.parent = id;
            c.input = i;
            c.param = p;
            c.at = now + off;
            c.spec_out = fast::step(spec, c.s, i, param, c.at);
            int mut_out = fast::step(mutant, c.m, minput[i], param, c.at);
            if (spec.output_name(c.spec_out) != mutant.output_name(mut_out)) {
              nodes.push_back(std::move(c));
              result.test = build(static_cast<int>(nodes.size()) - 1);
              result.nodes = nodes.size();
              return result;
            }
            admit(std::move(c), next);
          }
        }
      }
    }
    layer = std::move(next);
  }
  result.nodes = nodes.size();
  return result;
}

Verdict execute(const Machine& target, const TestCase& test) {
  for (const auto& s : test.steps) {
    int i = target.input_index(s.input);
    if (i < 0)
      throw Error(ErrorKind::AlphabetMismatch, "target '" + target.id() + "' has no input '" + s.input + "'");
    ValueKind want = target.input(i).param_kind;
    ValueKind got = s.param ? kind_of(*s.param) : ValueKind::None;
    if (want != got)
      throw Error(ErrorKind::AlphabetMismatch, "input '" + s.input + "' of target '" + target.id() +
                                                   "' takes a " + std::string(to_string(want)) + " parameter");
  }
  auto inputs = test.inputs();
  try {
    return compare_outputs(test, run(target, inputs).outputs());
  } catch (const RunError& e) {
    Verdict v;
    v.outcome = Outcome::Error;
    v.error = "step " + std::to_string(e.index()) + ": " + e.what();
    return v;
  }
}

VerdictReport execute_suite(const Suite& suite, const std::vector<NamedMachine>& targets) {
  VerdictReport report;
  report.suite_id = suite.suite_id;
  for (const auto& t : targets) report.targets.push_back({t.id, t.role});
  for (const auto& test : suite.tests)
    for (const auto& t : targets) report.rows.push_back({test.id, t.id, execute(*t.machine, test)});
  return report;
}

DeriveResult derive_suite(const Machine& spec, const std::vector<std::pair<std::string, Machine>>& mutants,
                          const SearchConfig& cfg) {
  DeriveResult out;
  out.suite.suite_id = spec.id() + "-attacks";
  out.suite.spec_id = spec.id();

  std::vector<char> killed(mutants.size(), 0);
  std::vector<TestCase> tests;
  for (std::size_t k = 0; k < mutants.size(); ++k) {
    if (killed[k]) continue;
    SearchResult r = distinguish(spec, mutants[k].second, cfg);
    if (!r.test) {
      out.undistinguished.push_back(mutants[k].first);
      if (r.budget_exhausted) out.budget_exhausted.push_back(mutants[k].first);
      continue;
    }
    TestCase t = std::move(*r.test);
    t.target = mutants[k].first;
    killed[k] = 1;
    for (std::size_t j = k + 1; j < mutants.size(); ++j)
      if (!killed[j] && execute(mutants[j].second, t).outcome == Outcome::Kill) killed[j] = 1;
    tests.push_back(std::move(t));
  }
  for (std::size_t n = 0; n < tests.size(); ++n) tests[n].id = test_id(n + 1, tests.size());
  out.suite.tests = std::move(tests);

  std::vector<NamedMachine> targets{{spec.id(), "spec", &spec}};
  for (const auto& [id, m] : mutants) targets.push_back({id, "mutant", &m});
  out.matrix = execute_suite(out.suite, targets);
  return out;
}

DeriveResult derive_suite(const Machine& spec, const MutantSet& mutants, const SearchConfig& cfg) {
  std::vector<std::pair<std::string, Machine>> ms;
  ms.reserve(mutants.mutants.size());
  for (const auto& d : mutants.mutants) ms.emplace_back(d.id, apply_descriptor(spec, d));
  return derive_suite(spec, ms, cfg);
}

std::string MutationScore::text() const {
  const std::uint64_t den = total - alive;
  // tenths of a percent, rounded half up
  const std::uint64_t tenths = (2000 * static_cast<std::uint64_t>(killed) + den) / (2 * den);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

double MutationScore::value() const {
  return 100.0 * static_cast<double>(killed) / static_cast<double>(total - alive);
}

MutationScore score(const KillMatrix& matrix, const std::vector<std::string>& alive) {
  MutationScore s;
  std::set<std::string> mutants;
  for (const auto& t : matrix.targets)
    if (t.role == "mutant") mutants.insert(t.id);
  std::set<std::string> alive_set(alive.begin(), alive.end());
  for (const auto& a : alive_set) {
    if (!mutants.count(a)) throw Error(ErrorKind::InvalidArgument, "alive mutant '" + a + "' is not in the matrix");
    if (matrix.killed(a)) throw Error(ErrorKind::InconsistentAlive, "mutant '" + a + "' is designated alive but killed");
  }
  s.total = mutants.size();
  s.alive = alive_set.size();
  for (const auto& m : mutants) s.killed += matrix.killed(m) ? 1 : 0;
  if (s.total == s.alive)
    throw Error(ErrorKind::InvalidArgument, "mutation score undefined: no mutants outside the alive set");
  return s;
}

}  // namespace tfsm
