#include "tfsm/suite.hpp"

#include <algorithm>

namespace tfsm {

std::vector<TimedInput> TestCase::inputs() const {
  std::vector<TimedInput> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back({s.input, s.param, s.at});
  return out;
}

std::vector<std::string> TestCase::expected() const {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.expect);
  return out;
}

std::string_view to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Pass: return "PASS";
    case Outcome::Kill: return "KILL";
    case Outcome::Error: return "ERROR";
  }
  return "ERROR";
}

Outcome outcome_from_string(std::string_view text) {
  if (text == "PASS") return Outcome::Pass;
  if (text == "KILL") return Outcome::Kill;
  if (text == "ERROR") return Outcome::Error;
  throw Error(ErrorKind::SchemaError, "unknown verdict '" + std::string(text) + "'");
}

Verdict compare_outputs(const TestCase& test, std::vector<std::string> observed) {
  Verdict v;
  std::size_t n = std::max(observed.size(), test.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    bool same = i < observed.size() && i < test.steps.size() && observed[i] == test.steps[i].expect;
    if (!same) {
      v.outcome = Outcome::Kill;
      v.divergence_index = i;
      break;
    }
  }
  v.observed = std::move(observed);
  return v;
}

const VerdictRow* VerdictReport::find(std::string_view test, std::string_view target) const {
  for (const auto& r : rows)
    if (r.test == test && r.target == target) return &r;
  return nullptr;
}

bool VerdictReport::killed(std::string_view target) const {
  return std::any_of(rows.begin(), rows.end(), [&](const VerdictRow& r) {
    return r.target == target && r.verdict.outcome == Outcome::Kill;
  });
}

}  // namespace tfsm
