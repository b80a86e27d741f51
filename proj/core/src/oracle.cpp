// Brute-force reference for distinguish(): every timed input sequence on a
// uniform grid, using only the public stepping API.
#include <numeric>
#include <set>
#include <sstream>

#include "tfsm/testgen.hpp"

namespace tfsm {

Millis default_quantum(const Machine& spec, const Machine& mutant) {
  Millis g = 0;
  for (const Machine* m : {&spec, &mutant})
    for (int s = 0; s < m->state_count(); ++s)
      if (m->timeout(s) != kInfinite) g = std::gcd(g, m->timeout(s));
  return std::max<Millis>(1, g / 2);
}

std::optional<TestCase> oracle_distinguish(const Machine& spec, const Machine& mutant, const OracleConfig& cfg) {
  for (int i = 0; i < spec.input_count(); ++i) {
    int j = mutant.input_index(spec.input(i).name);
    if (j < 0 || mutant.input(j).param_kind != spec.input(i).param_kind || spec.input_count() != mutant.input_count())
      throw Error(ErrorKind::AlphabetMismatch, "input alphabets differ");
  }
  const Millis q = cfg.quantum.value_or(default_quantum(spec, mutant));
  if (q < 1) throw Error(ErrorKind::InvalidArgument, "oracle quantum must be at least 1 ms");
  const auto pool = default_param_pool(spec, mutant);

  struct Node {
    Configuration s, m;
    int parent = -1;
    std::optional<TimedInput> input;
    std::string expect;
  };
  std::vector<Node> nodes;
  std::set<std::string> seen;

  // Two configurations equal up to absolute time, and up to the clock where
  // no timeout is pending, have identical futures.
  auto key_of = [&](const Node& n) {
    std::ostringstream os;
    for (auto [m, c] : {std::pair{&spec, &n.s}, std::pair{&mutant, &n.m}}) {
      os << c->state << ':' << (m->timeout(c->state) == kInfinite ? 0 : c->clock);
      for (const auto& v : c->env) os << ',' << format_value(v);
      os << ';';
    }
    return os.str();
  };
  auto admit = [&](Node&& n, std::vector<int>& layer) {
    if (!seen.insert(key_of(n)).second) return;
    if (nodes.size() >= cfg.node_budget)
      throw Error(ErrorKind::BudgetExceeded, "oracle explored " + std::to_string(nodes.size()) + " nodes");
    nodes.push_back(std::move(n));
    layer.push_back(static_cast<int>(nodes.size()) - 1);
  };

  std::vector<int> layer;
  admit(Node{initial_configuration(spec), initial_configuration(mutant), -1, std::nullopt, ""}, layer);

  for (int depth = 0; !layer.empty(); ++depth) {
    std::vector<int> next;
    for (std::size_t k = 0; k < layer.size(); ++k) {
      const int id = layer[k];
      const Millis at = nodes[id].s.now + q;

      Node tick{advance(spec, nodes[id].s, at).config, advance(mutant, nodes[id].m, at).config, id, std::nullopt, ""};
      admit(std::move(tick), layer);
      if (depth >= cfg.bound) continue;

      for (int i = 0; i < spec.input_count(); ++i)
        for (const auto& param : pool[i]) {
          TimedInput in{spec.input(i).name, param, at};
          StepResult rs = step_input(spec, nodes[id].s, in);
          StepResult rm = step_input(mutant, nodes[id].m, in);
          Node c{std::move(rs.config), std::move(rm.config), id, in, rs.output};
          if (rs.output != rm.output) {
            TestCase t;
            t.target = mutant.id();
            std::vector<const Node*> chain{&c};
            for (int n = id; n >= 0; n = nodes[n].parent)
              if (nodes[n].input) chain.push_back(&nodes[n]);
            for (auto it = chain.rbegin(); it != chain.rend(); ++it)
              t.steps.push_back({(*it)->input->symbol, (*it)->input->param, (*it)->input->at, (*it)->expect});
            return t;
          }
          admit(std::move(c), next);
        }
    }
    layer = std::move(next);
  }
  return std::nullopt;
}

}  // namespace tfsm
