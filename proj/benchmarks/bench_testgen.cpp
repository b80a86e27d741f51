#include <benchmark/benchmark.h>

#include "tfsm/engine.hpp"
#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"
#include "tfsm/testgen.hpp"

namespace {

const char* kModels[] = {"motion_sensor", "ultrasonic", "rfid"};

void BM_DeriveAttackSuite(benchmark::State& state) {
  tfsm::Machine spec = tfsm::load_bundled(kModels[state.range(0)]);
  tfsm::MutantSet attacks = tfsm::gen_attacks(spec, tfsm::all_attack_kinds());
  for (auto _ : state) benchmark::DoNotOptimize(tfsm::derive_suite(spec, attacks));
  state.SetLabel(kModels[state.range(0)]);
}
BENCHMARK(BM_DeriveAttackSuite)->DenseRange(0, 2);

void BM_DistinguishIdentical(benchmark::State& state) {
  tfsm::Machine spec = tfsm::load_bundled("rfid");
  for (auto _ : state) benchmark::DoNotOptimize(tfsm::distinguish(spec, spec));
}
BENCHMARK(BM_DistinguishIdentical);

void BM_RunTrace(benchmark::State& state) {
  tfsm::Machine m = tfsm::load_bundled("motion_sensor");
  std::vector<tfsm::TimedInput> seq;
  const char* cycle[] = {"i2", "i3", "i4", "i5", "i5", "i7", "i10", "i8", "i9"};
  for (int k = 0; k < state.range(0); ++k) seq.push_back({cycle[k % 9], std::nullopt, 700 * (k + 1)});
  for (auto _ : state) benchmark::DoNotOptimize(tfsm::run(m, seq));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrace)->Arg(16)->Arg(1024);

}  // namespace
BENCHMARK_MAIN();
