#include "random_machines.hpp"

#include <random>

#include "tfsm/mutation.hpp"

namespace tfsm::testing {

namespace {

struct Rng {
  std::mt19937_64 gen;
  int below(int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }
};

MachineDef random_def(Rng& r, int states, int inputs, int outputs) {
  MachineDef d;
  d.id = "random";
  for (int s = 0; s < states; ++s) d.states.push_back({"S" + std::to_string(s + 1), "", false});
  d.initial = "S1";
  for (int i = 0; i < inputs; ++i) d.inputs.push_back({"i" + std::to_string(i + 1), ValueKind::None, "", "", false});
  for (int o = 0; o < outputs; ++o) d.outputs.push_back({"o" + std::to_string(o + 1), "", false});
  for (int s = 0; s < states; ++s)
    d.timeouts.push_back({d.states[s].name, 1000 * (1 + r.below(5)), d.states[r.below(states)].name, false});
  int n = 0;
  for (int s = 0; s < states; ++s)
    for (int i = 0; i < inputs; ++i)
      if (r.chance(60))
        d.transitions.push_back({"t" + std::to_string(++n), d.states[s].name, d.inputs[i].name, "", {},
                                 d.outputs[r.below(outputs)].name, d.states[r.below(states)].name, false});
  return d;
}

}  // namespace

RandomPair random_pair(std::uint64_t seed) {
  Rng r{std::mt19937_64(seed)};
  const int states = 2 + r.below(5);
  const int inputs = 1 + r.below(3);
  const int outputs = 2 + r.below(2);
  MachineDef spec = random_def(r, states, inputs, outputs);

  int mode = r.below(100);
  if (mode < 5) return {Machine::compile(spec), Machine::compile(spec), "identical"};
  if (mode < 15) {
    MachineDef other = random_def(r, 2 + r.below(5), inputs, outputs);
    return {Machine::compile(spec), Machine::compile(other), "independent"};
  }

  while (true) {
    Edit e;
    std::string what;
    switch (r.below(4)) {
      case 0: {
        if (spec.transitions.empty()) continue;
        const auto& t = spec.transitions[r.below(static_cast<int>(spec.transitions.size()))];
        e = SetOutput{t.id, spec.outputs[r.below(outputs)].name};
        what = "output " + t.id;
        break;
      }
      case 1: {
        const auto& t = spec.timeouts[r.below(states)];
        e = SetTimeout{t.state, 1000 * (1 + r.below(5))};
        what = "timeout " + t.state;
        break;
      }
      case 2:
        e = AddTransition{"tx", spec.states[r.below(states)].name, spec.inputs[r.below(inputs)].name,
                          spec.outputs[r.below(outputs)].name, spec.states[r.below(states)].name};
        what = "add transition";
        break;
      default: {
        if (spec.transitions.empty()) continue;
        const auto& t = spec.transitions[r.below(static_cast<int>(spec.transitions.size()))];
        e = AddState{"Sx", t.id, 1000 * (1 + r.below(5)), spec.states[r.below(states)].name};
        what = "add state after " + t.id;
        break;
      }
    }
    try {
      MachineDef mut = apply_edit(spec, e);
      return {Machine::compile(spec), Machine::compile(std::move(mut)), what};
    } catch (const Error&) {
      // NoOp or conflicting edit: draw another
    }
  }
}

}  // namespace tfsm::testing
