#include "tfsm/wire/fingerprint.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tfsm/format.hpp"
#include "tfsm/testgen.hpp"

namespace tfsm::wire {

std::string verdict_pattern(const std::vector<Verdict>& verdicts) {
  std::string p;
  for (const auto& v : verdicts) p.push_back(v.outcome == Outcome::Pass ? 'P' : v.outcome == Outcome::Kill ? 'K' : 'E');
  return p;
}

FingerprintReport fingerprint(const Endpoint& endpoint, const Machine& spec, const MutantSet& descriptors,
                              const Suite& suite, ClientOptions options) {
  FingerprintReport report;
  report.suspect = endpoint.to_string();
  report.phase1 = client_run(endpoint, suite, report.suspect, "spec", options);
  bool all_pass = std::all_of(report.phase1.rows.begin(), report.phase1.rows.end(),
                              [](const VerdictRow& r) { return r.verdict.outcome == Outcome::Pass; });

  bool all_match = true;
  for (const auto& d : descriptors.mutants) {
    Machine reference = apply_descriptor(spec, d);
    std::vector<Verdict> expected, observed;
    for (const auto& t : suite.tests) expected.push_back(execute(reference, t));

    Client client(endpoint, options);
    client.open(suite.spec_id);
    client.mutate(serialize_descriptor(d));
    for (const auto& t : suite.tests) {
      try {
        observed.push_back(client.run_test(t));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TransportError) throw;
        Verdict v;
        v.outcome = Outcome::Error;
        v.error = e.what();
        observed.push_back(std::move(v));
        // The injected fault is lost with the session; restore it before continuing.
        client.open(suite.spec_id);
        client.mutate(serialize_descriptor(d));
      }
    }
    client.close();

    FingerprintRow row{d.id, verdict_pattern(expected), verdict_pattern(observed), false};
    row.match = row.expected == row.observed;
    all_match = all_match && row.match;
    report.rows.push_back(std::move(row));
  }
  report.consistent = all_pass && all_match;
  return report;
}

std::string serialize_fingerprint(const FingerprintReport& report) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"descriptor", r.descriptor}, {"expected", r.expected}, {"observed", r.observed}, {"match", r.match}});
  json phase1 = json::parse(serialize_verdicts(report.phase1));
  json j = {{"schema", kSchemaVersion},   {"kind", "fingerprint"}, {"suspect", report.suspect},
            {"phase1", std::move(phase1)}, {"rows", std::move(rows)}, {"conclusion", report.conclusion()}};
  return j.dump(2) + "\n";
}

}  // namespace tfsm::wire
