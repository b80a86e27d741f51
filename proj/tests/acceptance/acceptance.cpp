// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any failed.
#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "random_machines.hpp"
#include "tfsm/engine.hpp"
#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"
#include "tfsm/testgen.hpp"
#include "tfsm/wire/client.hpp"
#include "tfsm/wire/fingerprint.hpp"
#include "tfsm/wire/server.hpp"

using namespace tfsm;
using Clock = std::chrono::steady_clock;

namespace {

const char* kModels[] = {"motion_sensor", "ultrasonic", "rfid"};

// Collects failed checks for one criterion; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool criterion(const std::string& name, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string summary;
  try {
    summary = body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  bool ok = c.failures.empty();
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!summary.empty()) std::cout << " - " << summary;
  std::cout << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(c.failures.size(), 8); ++i)
    std::cout << "         " << c.failures[i] << "\n";
  if (c.failures.size() > 8) std::cout << "         (" << c.failures.size() - 8 << " more)\n";
  std::cout.flush();
  return ok;
}

TimedInput at(const char* symbol, Millis t) { return {symbol, std::nullopt, t}; }

std::string ac1(Check& c) {
  auto start = Clock::now();
  Machine pp = parse_model(R"({"schema":"tfsm/1","kind":"model","machine":{
    "id":"pp","initial":"A","states":[{"name":"A"},{"name":"B"}],
    "inputs":[{"name":"a"},{"name":"b"},{"name":"go"}],"outputs":[{"name":"x"},{"name":"y"}],
    "variables":[{"name":"u","kind":"int","init":1},{"name":"w","kind":"int","init":2}],
    "timeouts":[{"state":"A","t_out":1000,"dst":"B"},{"state":"B","t_out":1000,"dst":"A"}],
    "transitions":[{"id":"t1","src":"A","input":"a","output":"x","dst":"A"},
                   {"id":"t2","src":"B","input":"a","output":"y","dst":"A"},
                   {"id":"t3","src":"A","input":"go","updates":["u := w","w := u"],"output":"x","dst":"A"}]}})");
  auto init = initial_configuration(pp);

  // clock reset
  auto r = step_input(pp, init, at("a", 900));
  c.expect(r.config.clock == 0, "clock not reset by transition");
  c.expect(pp.state_name(advance(pp, r.config, 1899).config.state) == "A", "dwell not restarted after reset");

  // timeout exactness
  c.expect(pp.state_name(advance(pp, init, 999).config.state) == "A", "timeout fired at T-1");
  c.expect(pp.state_name(advance(pp, init, 1000).config.state) == "B", "timeout did not fire at T");

  // boundary rule
  c.expect(step_input(pp, init, at("a", 1000)).output == "y", "input at t_out processed before timeout");
  c.expect(step_input(pp, init, at("a", 999)).output == "x", "input at t_out-1 saw the timeout");

  // concurrent update swap
  auto sw = step_input(pp, init, at("go", 10)).config.env;
  c.expect(sw == std::vector<Value>{std::int64_t{2}, std::int64_t{1}}, "updates not applied concurrently");

  // ignore stability
  auto mid = advance(pp, init, 300).config;
  auto ig = step_input(pp, mid, at("b", 300));
  c.expect(ig.output == kEpsilon && ig.config == mid, "ignored input changed the configuration");

  // trace closure over random machines
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto p = tfsm::testing::random_pair(seed);
    std::vector<TimedInput> seq;
    Millis t = 0;
    for (int k = 0; k < 6; ++k) {
      t += 1 + static_cast<Millis>((seed * 7919 + k * 104729) % 4000);
      seq.push_back(TimedInput{p.spec.input(static_cast<int>((seed + k) % p.spec.input_count())).name, std::nullopt, t});
    }
    auto full = run(p.spec, seq);
    for (std::size_t k = 0; k <= seq.size(); ++k) {
      auto prefix = run(p.spec, std::span(seq).first(k));
      auto rest = run_from(p.spec, prefix.final_config, std::span(seq).subspan(k));
      auto joined = prefix.outputs();
      for (const auto& o : rest.outputs()) joined.push_back(o);
      if (joined != full.outputs() || rest.final_config != full.final_config) {
        c.expect(false, "trace not closed under split at " + std::to_string(k) + ", seed " + std::to_string(seed));
        break;
      }
    }
  }
  double s = seconds_since(start);
  c.expect(s < 5.0, "runtime " + std::to_string(s) + " s exceeds 5 s");
  std::ostringstream os;
  os << "semantics suite in " << s << " s";
  return os.str();
}

std::string ac2(Check& c) {
  Machine motion = load_bundled("motion_sensor");
  std::string t1 = format_trace(run(motion, {}, 4000));
  c.expect(t1 == "(eps, t_out=2000)(eps, t_out=2000)", "motion idle trace: " + t1);
  std::vector<TimedInput> seq{at("i1", 3000)};
  std::string t2 = format_trace(run(motion, seq));
  c.expect(t2 == "(eps, t_out=2000)((i1, t=1000), o1)", "motion i1 trace: " + t2);

  Machine rfid = load_bundled("rfid");
  Configuration start = initial_configuration(rfid);
  start.state = rfid.state_index("S11");
  std::vector<TimedInput> bytes{{"data_byte", Value(std::string("B")), 100}, {"data_byte", Value(std::string("A")), 200}};
  auto tr = run_from(rfid, start, bytes);
  c.expect(tr.outputs() == std::vector<std::string>{"o13", "o13"}, "rfid outputs differ");
  const auto& f = tr.final_config;
  bool end_ok = rfid.state_name(f.state) == "S11" && f.env[rfid.variable_index("counter")] == Value(std::int64_t{2}) &&
                f.env[rfid.variable_index("code")] == Value(std::string("BA"));
  c.expect(end_ok, "rfid final configuration is not (S11, 2, \"BA\")");
  return t1 + " | " + t2 + " | rfid " + format_trace(tr);
}

std::string ac3(Check& c) {
  struct Want {
    std::size_t a1, a2, a3, a4, a5, inc;
  };
  const Want want[] = {{5, 1, 7, 1, 4, 5}, {7, 1, 8, 1, 4, 7}, {5, 1, 11, 1, 4, 5}};
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    MutantSet s = gen_attacks(load_bundled(kModels[i]), all_attack_kinds());
    const Want& w = want[i];
    std::size_t got[] = {s.count(MutantKind::BatteryDrain),     s.count(MutantKind::SleepDeprivation),
                         s.count(MutantKind::DataFalsification), s.count(MutantKind::Replay),
                         s.count(MutantKind::ManInTheMiddle),    s.count(MutantKind::IncreasedTimeout)};
    std::size_t exp[] = {w.a1, w.a2, w.a3, w.a4, w.a5, w.inc};
    for (int k = 0; k < 6; ++k)
      c.expect(got[k] == exp[k], std::string(kModels[i]) + " kind " + std::to_string(k) + ": " +
                                     std::to_string(got[k]) + " != " + std::to_string(exp[k]));
    bool total_warned = std::any_of(s.warnings.begin(), s.warnings.end(),
                                    [](const std::string& w) { return w.rfind("total:", 0) == 0; });
    c.expect(total_warned, std::string(kModels[i]) + ": total discrepancy not warned");
    if (i == 2) {
      auto eights = std::count_if(s.warnings.begin(), s.warnings.end(),
                                  [](const std::string& w) { return w.find("8 are reported") != std::string::npos; });
      c.expect(eights == 2, "rfid: the two \"8\" discrepancies are not both warned");
    }
    os << kModels[i] << " " << s.mutants.size() << " (" << s.warnings.size() << " warnings) ";
  }
  return os.str();
}

std::string ac4(Check& c) {
  std::ostringstream os;
  for (const char* name : kModels) {
    auto start = Clock::now();
    Machine spec = load_bundled(name);
    MutantSet attacks = gen_attacks(spec, all_attack_kinds());
    DeriveResult r = derive_suite(spec, attacks);
    double s = seconds_since(start);
    for (const auto& d : attacks.mutants) c.expect(r.matrix.killed(d.id), std::string(name) + ": " + d.id + " alive");
    for (const auto& t : r.suite.tests)
      c.expect(r.matrix.find(t.id, spec.id())->verdict.outcome == Outcome::Pass,
               std::string(name) + ": " + t.id + " fails on the reference model");
    c.expect(r.suite.tests.size() < attacks.mutants.size(), std::string(name) + ": no cross-kill");
    c.expect(s < 60.0, std::string(name) + ": runtime " + std::to_string(s) + " s");
    MutationScore ms = score(r.matrix, {});
    c.expect(ms.text() == "100.0", std::string(name) + ": score " + ms.text());
    os << name << " " << r.suite.tests.size() << " tests/" << attacks.mutants.size() << " mutants " << ms.text()
       << "% in " << s << " s; ";
  }
  return os.str();
}

std::string ac5(Check& c) {
  Machine spec = load_bundled("motion_sensor");
  Machine mutant = apply_descriptor(spec, {"M_A3", MutantKind::DataFalsification, SetOutput{"t11", "o6"}});
  auto r = distinguish(spec, mutant);
  if (!r.test) {
    c.expect(false, "no test found for the t11 output fault");
    return "";
  }
  Verdict on_spec = execute(spec, *r.test);
  Verdict on_mut = execute(mutant, *r.test);
  c.expect(on_spec.outcome == Outcome::Pass, "test fails on the reference model");
  c.expect(on_mut.outcome == Outcome::Kill, "mutant not killed");
  if (on_mut.divergence_index) {
    std::size_t k = *on_mut.divergence_index;
    c.expect(r.test->steps[k].expect == "o5", "expected output at divergence is " + r.test->steps[k].expect);
    c.expect(on_mut.observed[k] == "o6", "observed output at divergence is " + on_mut.observed[k]);
  }
  std::ostringstream os;
  for (const auto& s : r.test->steps) os << "(" << s.input << ", " << s.at << ")/" << s.expect << " ";
  os << "-> mutant " << (on_mut.divergence_index ? on_mut.observed[*on_mut.divergence_index] : "?");
  return os.str();
}

std::string ac6(Check& c) {
  auto start = Clock::now();
  const std::uint64_t pairs = 1000;
  std::size_t distinguishable = 0;
  for (std::uint64_t seed = 1; seed <= pairs; ++seed) {
    auto p = tfsm::testing::random_pair(seed);
    SearchConfig cfg;
    cfg.max_steps = 8;
    auto fast = distinguish(p.spec, p.mutant, cfg);
    auto slow = oracle_distinguish(p.spec, p.mutant, OracleConfig{8, std::nullopt, 4'000'000});
    std::string tag = "seed " + std::to_string(seed) + " (" + p.fault + ")";
    c.expect(!fast.budget_exhausted, tag + ": search budget exhausted");
    c.expect(fast.test.has_value() == slow.has_value(), tag + ": search " + (fast.test ? "found" : "missed") +
                                                            ", oracle " + (slow ? "found" : "missed"));
    if (fast.test) {
      ++distinguishable;
      c.expect(execute(p.mutant, *fast.test).outcome == Outcome::Kill, tag + ": search test does not kill");
      c.expect(execute(p.spec, *fast.test).outcome == Outcome::Pass, tag + ": search test fails on the reference model");
    }
    if (slow) c.expect(execute(p.mutant, *slow).outcome == Outcome::Kill, tag + ": oracle test does not kill");
  }
  double s = seconds_since(start);
  c.expect(s < 600.0, "runtime " + std::to_string(s) + " s exceeds 10 min");
  std::ostringstream os;
  os << pairs << " pairs, " << distinguishable << " distinguishable, " << s << " s";
  return os.str();
}

KillMatrix synthetic(std::size_t killed, std::size_t total) {
  KillMatrix k;
  k.suite_id = "synthetic";
  k.targets.push_back({"spec", "spec"});
  for (std::size_t i = 0; i < total; ++i) {
    std::string id = "M" + std::to_string(i);
    k.targets.push_back({id, "mutant"});
    k.rows.push_back({"T01", id,
                      i < killed ? Verdict{Outcome::Kill, 0, {"x"}, ""} : Verdict{Outcome::Pass, std::nullopt, {"o"}, ""}});
  }
  return k;
}

std::string ac7(Check& c) {
  std::string a = score(synthetic(9, 40), {}).text();
  std::string b = score(synthetic(8, 40), {}).text();
  std::string d = score(synthetic(6, 40), {}).text();
  c.expect(a == "22.5", "9/40 gives " + a);
  c.expect(b == "20.0", "8/40 gives " + b);
  c.expect(d == "15.0", "6/40 gives " + d);
  return a + " / " + b + " / " + d;
}

wire::ClientOptions client_options(wire::Transcript* record = nullptr) {
  wire::ClientOptions o;
  o.timeout = std::chrono::milliseconds(5000);
  o.record = record;
  return o;
}

std::string ac8(Check& c) {
  std::ostringstream os;
  for (const char* name : kModels) {
    auto spec = std::make_shared<const Machine>(load_bundled(name));
    MutantSet attacks = gen_attacks(*spec, all_attack_kinds());
    Suite suite = derive_suite(*spec, attacks).suite;

    auto server = wire::Server::start(spec, wire::Endpoint{"127.0.0.1", 0});
    wire::Transcript recorded;
    VerdictReport remote = wire::client_run(server->endpoint(), suite, name, "spec", client_options(&recorded));
    VerdictReport local = execute_suite(suite, {{name, "spec", spec.get()}});
    c.expect(remote == local, std::string(name) + ": spec verdicts differ over the wire");
    wire::Transcript again = wire::replay_transcript(server->endpoint(), recorded, client_options());
    c.expect(wire::format_transcript(again) == wire::format_transcript(recorded),
             std::string(name) + ": transcript replay differs");
    server->stop();

    // Ten mutants spread evenly over the attack set, each served on its own.
    std::size_t compared = 0;
    for (std::size_t k = 0; k < 10; ++k) {
      const auto& d = attacks.mutants[k * attacks.mutants.size() / 10];
      auto mutant = std::make_shared<const Machine>(apply_descriptor(*spec, d));
      auto ms = wire::Server::start(mutant, wire::Endpoint{"127.0.0.1", 0});
      VerdictReport r = wire::client_run(ms->endpoint(), suite, d.id, "mutant", client_options());
      VerdictReport l = execute_suite(suite, {{d.id, "mutant", mutant.get()}});
      c.expect(r == l, std::string(name) + ": verdicts differ for " + d.id);
      ms->stop();
      ++compared;
    }
    os << name << " " << suite.tests.size() << " tests x (spec + " << compared << " mutants), "
       << recorded.exchanges.size() << " exchanges replayed; ";
  }
  return os.str();
}

// Phase-1 verdicts all PASS and at least one phase-2 pattern differs, computed in process.
bool passes_phase1_fails_phase2(const Machine& spec, const Machine& fake, const MutantSet& attacks, const Suite& suite) {
  for (const auto& t : suite.tests)
    if (execute(fake, t).outcome != Outcome::Pass) return false;
  for (const auto& d : attacks.mutants) {
    Machine expected = apply_descriptor(spec, d);
    std::optional<Machine> observed;
    try {
      observed = apply_descriptor(fake, d);
    } catch (const Error&) {
      return true;  // the suspect rejects a fault the genuine device accepts
    }
    for (const auto& t : suite.tests)
      if (execute(expected, t).outcome != execute(*observed, t).outcome) return true;
  }
  return false;
}

std::string ac9(Check& c) {
  auto spec = std::make_shared<const Machine>(load_bundled("motion_sensor"));
  MutantSet attacks = gen_attacks(*spec, all_attack_kinds());
  Suite suite = derive_suite(*spec, attacks).suite;

  auto genuine = wire::Server::start(spec, wire::Endpoint{"127.0.0.1", 0}, wire::ServeOptions{true, false});
  auto faithful = wire::fingerprint(genuine->endpoint(), *spec, attacks, suite, client_options());
  genuine->stop();
  c.expect(faithful.conclusion() == "CONSISTENT", "faithful device judged " + faithful.conclusion());

  // Counterfeit: the reference model plus one undocumented self-loop that the suite
  // alone does not expose.
  const MachineDef& def = spec->def();
  std::optional<MachineDef> fake_def;
  std::string loop;
  for (const auto& s : def.states) {
    for (const auto& in : def.inputs) {
      for (const auto& out : def.outputs) {
        MachineDef candidate;
        try {
          candidate = apply_edit(def, AddTransition{"t_fake", s.name, in.name, out.name, s.name});
        } catch (const Error&) {
          continue;
        }
        if (passes_phase1_fails_phase2(*spec, Machine::compile(candidate), attacks, suite)) {
          fake_def = candidate;
          loop = s.name + " -" + in.name + "/" + out.name + "-> " + s.name;
          break;
        }
      }
      if (fake_def) break;
    }
    if (fake_def) break;
  }
  if (!fake_def) {
    c.expect(false, "no single self-loop counterfeit passes phase 1 and fails phase 2");
    return "";
  }
  auto fake = std::make_shared<const Machine>(Machine::compile(*fake_def));
  auto suspect = wire::Server::start(fake, wire::Endpoint{"127.0.0.1", 0}, wire::ServeOptions{true, false});
  auto report = wire::fingerprint(suspect->endpoint(), *spec, attacks, suite, client_options());
  suspect->stop();
  bool phase1_pass = std::all_of(report.phase1.rows.begin(), report.phase1.rows.end(),
                                 [](const VerdictRow& r) { return r.verdict.outcome == Outcome::Pass; });
  c.expect(phase1_pass, "counterfeit failed phase 1");
  c.expect(report.conclusion() == "SUSPECT", "counterfeit judged " + report.conclusion());
  std::string mismatches;
  for (const auto& row : report.rows)
    if (!row.match) mismatches += " " + row.descriptor + "(" + row.expected + " vs " + row.observed + ")";
  c.expect(!mismatches.empty(), "no phase-2 mismatch recorded");
  return "faithful " + faithful.conclusion() + "; counterfeit [" + loop + "] " + report.conclusion() +
         " via" + mismatches;
}

std::string ac10(Check& c) {
  std::ostringstream os;
  for (const char* name : kModels) {
    std::vector<std::string> args{"tfsm", "report", "--model", name, "--traditional", "40", "--seed", "1", "--format", "json"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    c.expect(code == 0, std::string(name) + ": report exited " + std::to_string(code) + ": " + err.str());
    if (code != 0) continue;
    auto j = nlohmann::json::parse(out.str());
    const auto& t = j.at("traditional");
    c.expect(t.at("total").get<int>() == 40, std::string(name) + ": traditional total is not 40");
    c.expect(t.contains("alive") && t.contains("score"), std::string(name) + ": score or alive count missing");
    os << name << " " << t.at("score").get<std::string>() << "% (killed " << t.at("killed") << "/40, alive "
       << t.at("alive") << "); ";
  }
  return os.str();
}

}  // namespace

int main() {
  bool ok = true;
  ok &= criterion("AC1 semantics suite", ac1);
  ok &= criterion("AC2 trace pins", ac2);
  ok &= criterion("AC3 mutant counts", ac3);
  ok &= criterion("AC4 full attack kill", ac4);
  ok &= criterion("AC5 A3 reproduction", ac5);
  ok &= criterion("AC6 oracle equivalence", ac6);
  ok &= criterion("AC7 score arithmetic", ac7);
  ok &= criterion("AC8 wire transparency", ac8);
  ok &= criterion("AC9 fingerprinting", ac9);
  ok &= criterion("AC10 traditional-mutant coverage", ac10);
  return ok ? 0 : 1;
}
