#pragma once

#include <string>
#include <vector>

#include "tfsm/mutation.hpp"
#include "tfsm/suite.hpp"
#include "tfsm/wire/client.hpp"

namespace tfsm::wire {

struct FingerprintRow {
  std::string descriptor;
  std::string expected;  // one letter per test: P(ass), K(ill), E(rror)
  std::string observed;
  bool match = false;
};

struct FingerprintReport {
  std::string suspect;
  VerdictReport phase1;
  std::vector<FingerprintRow> rows;
  bool consistent = false;

  std::string conclusion() const { return consistent ? "CONSISTENT" : "SUSPECT"; }
};

std::string verdict_pattern(const std::vector<Verdict>& verdicts);

/// Phase 1 runs the suite on the unmodified suspect; phase 2 injects each
/// descriptor over MUTATE and compares the pass/kill pattern with the one the
/// mutated spec produces in process.
/// Throws Error(MutateUnsupported) or Error(TransportError).
FingerprintReport fingerprint(const Endpoint& endpoint, const Machine& spec, const MutantSet& descriptors,
                              const Suite& suite, ClientOptions options = {});

std::string serialize_fingerprint(const FingerprintReport& report);

}  // namespace tfsm::wire
