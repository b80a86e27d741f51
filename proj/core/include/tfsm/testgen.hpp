#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfsm/mutation.hpp"
#include "tfsm/suite.hpp"

namespace tfsm {

struct SearchConfig {
  /// Maximum number of inputs in a test; waits are free.
  int max_steps = 12;
  /// Product nodes explored before giving up on one mutant.
  std::size_t node_budget = 2'000'000;
  /// Per-input parameter candidates, replacing the defaults for that input.
  std::map<std::string, std::vector<Value>> param_pool;
};

struct SearchResult {
  std::optional<TestCase> test;  // empty: not distinguishable within the bounds
  std::size_t nodes = 0;
  bool budget_exhausted = false;
};

/// Candidate parameters per spec input (nullopt for parameterless inputs).
/// Ints: 0, 1 and every int literal of either machine with its neighbours.
/// Strings: non-empty string literals of either machine plus one fresh character.
std::vector<std::vector<std::optional<Value>>> default_param_pool(const Machine& spec, const Machine& mutant,
                                                                  const SearchConfig& cfg = {});

/// Breadth-first search over the synchronous product, layered by input count.
/// The returned test carries the reference model's outputs as expectations.
/// Throws Error(AlphabetMismatch) when the input alphabets differ.
SearchResult distinguish(const Machine& spec, const Machine& mutant, const SearchConfig& cfg = {});

struct OracleConfig {
  int bound = 8;                  // inputs
  std::optional<Millis> quantum;  // default_quantum() when unset
  std::size_t node_budget = 4'000'000;
};

/// Half the gcd of every finite timeout of both machines, at least 1 ms.
Millis default_quantum(const Machine& spec, const Machine& mutant);

/// Exhaustive enumeration on a uniform time grid, built only on step_input
/// and advance. Throws Error(BudgetExceeded) past the node budget.
std::optional<TestCase> oracle_distinguish(const Machine& spec, const Machine& mutant,
                                           const OracleConfig& cfg = {});

/// Replays the test on the target. Execution failures give an ERROR verdict;
/// inputs unknown to the target throw Error(AlphabetMismatch).
Verdict execute(const Machine& target, const TestCase& test);

struct NamedMachine {
  std::string id;
  std::string role;  // "spec" or "mutant"
  const Machine* machine = nullptr;
};

/// Runs every test against every target; rows are ordered test-major.
VerdictReport execute_suite(const Suite& suite, const std::vector<NamedMachine>& targets);

struct DeriveResult {
  Suite suite;
  KillMatrix matrix;                        // spec plus every mutant
  std::vector<std::string> undistinguished; // mutants no test was found for
  std::vector<std::string> budget_exhausted;// subset of the above that hit the node budget
};

DeriveResult derive_suite(const Machine& spec, const std::vector<std::pair<std::string, Machine>>& mutants,
                          const SearchConfig& cfg = {});
DeriveResult derive_suite(const Machine& spec, const MutantSet& mutants, const SearchConfig& cfg = {});

struct MutationScore {
  std::size_t killed = 0;
  std::size_t total = 0;
  std::size_t alive = 0;

  /// Percentage rounded half-up to one decimal, e.g. "22.5".
  std::string text() const;
  double value() const;
};

/// Throws Error(InconsistentAlive) when an alive mutant was killed and
/// Error(InvalidArgument) for unknown alive ids or an empty denominator.
MutationScore score(const KillMatrix& matrix, const std::vector<std::string>& alive);

}  // namespace tfsm
