#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tfsm/engine.hpp"

namespace tfsm {

struct TestStep {
  std::string input;
  std::optional<Value> param;
  Millis at = 0;       // absolute
  std::string expect;  // spec output or kEpsilon
  bool operator==(const TestStep&) const = default;
};

struct TestCase {
  std::string id;
  std::string target;  // mutant the test was derived against (may be empty)
  std::vector<TestStep> steps;
  bool operator==(const TestCase&) const = default;

  std::vector<TimedInput> inputs() const;
  std::vector<std::string> expected() const;
};

struct Suite {
  std::string suite_id;
  std::string spec_id;
  std::vector<TestCase> tests;
  bool operator==(const Suite&) const = default;
};

enum class Outcome { Pass, Kill, Error };

std::string_view to_string(Outcome o) noexcept;
Outcome outcome_from_string(std::string_view text);  // throws Error(SchemaError)

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::optional<std::size_t> divergence_index;  // set iff Kill
  std::vector<std::string> observed;
  std::string error;  // set iff Error
  bool operator==(const Verdict&) const = default;
};

/// Compares observed outputs against a test's expectations position-wise.
Verdict compare_outputs(const TestCase& test, std::vector<std::string> observed);

struct TargetRef {
  std::string id;
  std::string role;  // "spec" or "mutant"
  bool operator==(const TargetRef&) const = default;
};

struct VerdictRow {
  std::string test;
  std::string target;
  Verdict verdict;
  bool operator==(const VerdictRow&) const = default;
};

/// Verdicts of a suite over a set of targets. With mutant targets this is the kill matrix.
struct VerdictReport {
  std::string suite_id;
  std::vector<TargetRef> targets;
  std::vector<VerdictRow> rows;
  bool operator==(const VerdictReport&) const = default;

  const VerdictRow* find(std::string_view test, std::string_view target) const;
  bool killed(std::string_view target) const;
};

using KillMatrix = VerdictReport;

}  // namespace tfsm
