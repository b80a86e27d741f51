#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tfsm/format.hpp"
#include "tfsm/testgen.hpp"
#include "tfsm/wire/client.hpp"
#include "tfsm/wire/fingerprint.hpp"
#include "tfsm/wire/server.hpp"

namespace tfsm::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

/// A file path, or the name of a bundled model.
Machine load_model(const std::string& ref) {
  if (std::filesystem::exists(ref)) {
    try {
      return parse_model(read_file(ref));
    } catch (const Error& e) {
      throw Error(e.kind(), ref + ": " + e.what());
    }
  }
  return load_bundled(ref);
}

template <class T, class F>
T load_doc(const std::string& path, F parse) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::vector<MutantKind> parse_attack_list(const std::string& text) {
  if (text == "all") return all_attack_kinds();
  std::vector<MutantKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string tag;
    for (char c : item) tag.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    bool found = false;
    for (MutantKind k : all_attack_kinds())
      if (kind_tag(k) == tag) {
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
        found = true;
      }
    if (!found)
      throw Error(ErrorKind::InvalidArgument, "unknown attack '" + item + "' (expected all or A1..A5, inc)");
  }
  if (kinds.empty()) throw Error(ErrorKind::InvalidArgument, "empty attack list");
  return kinds;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TFSM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, std::string("TFSM_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::TransportError:
    case ErrorKind::BindError:
    case ErrorKind::ProtocolError:
    case ErrorKind::MutateUnsupported:
      return kTransport;
    case ErrorKind::InvalidArgument:
      return kUsage;
    default:
      return kInvalidInput;
  }
}

struct ReportData {
  std::string model;
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::size_t mutants = 0;
  std::size_t suite_size = 0;
  MutationScore attack_score;
  std::vector<std::string> undistinguished;
  std::optional<MutationScore> traditional;
  std::optional<std::uint64_t> traditional_seed;
  std::vector<std::string> notes;
};

std::string render_text(const ReportData& r) {
  std::ostringstream os;
  os << "model " << r.model << "\n\n";
  os << std::left << std::setw(6) << "kind" << std::setw(20) << "attack" << "mutants\n";
  for (const auto& [tag, n] : r.counts) {
    std::string name;
    for (MutantKind k : all_attack_kinds())
      if (kind_tag(k) == tag) name = std::string(to_string(k));
    os << std::setw(6) << tag << std::setw(20) << name << n << "\n";
  }
  os << std::setw(26) << "total" << r.mutants << (r.notes.empty() ? "" : " [1]") << "\n\n";
  os << "suite size        " << r.suite_size << " tests\n";
  os << "attack score      " << r.attack_score.text() << "% (killed " << r.attack_score.killed << " of "
     << r.attack_score.total << ", alive " << r.attack_score.alive << ")\n";
  if (r.traditional)
    os << "traditional score " << r.traditional->text() << "% (killed " << r.traditional->killed << " of "
       << r.traditional->total << ", alive " << r.traditional->alive << ", seed " << *r.traditional_seed << ")\n";
  if (!r.undistinguished.empty()) {
    os << "not distinguished:";
    for (const auto& id : r.undistinguished) os << " " << id;
    os << "\n";
  }
  if (!r.notes.empty()) {
    os << "\n[1] generated counts differ from the counts reported for this device:\n";
    for (const auto& n : r.notes) os << "    " << n << "\n";
  }
  return os.str();
}

std::string render_json(const ReportData& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [tag, n] : r.counts) counts[tag] = n;
  auto score_json = [](const MutationScore& s) {
    return nlohmann::json{{"killed", s.killed}, {"total", s.total}, {"alive", s.alive}, {"score", s.text()}};
  };
  nlohmann::json j = {{"schema", kSchemaVersion},
                      {"kind", "report"},
                      {"model", r.model},
                      {"counts", counts},
                      {"mutants", r.mutants},
                      {"suite_size", r.suite_size},
                      {"attack", score_json(r.attack_score)},
                      {"undistinguished", r.undistinguished},
                      {"notes", r.notes}};
  if (r.traditional) {
    j["traditional"] = score_json(*r.traditional);
    j["traditional"]["seed"] = *r.traditional_seed;
  }
  return j.dump(2) + "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Timed state machine attack-mutation testing toolkit", "tfsm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // validate
  std::string model;
  auto* validate = app.add_subcommand("validate", "Check a model document");
  validate->add_option("--model", model, "Model file or bundled name")->required();

  // mutate
  std::string attacks, out_path;
  std::size_t traditional = 0;
  std::optional<std::uint64_t> seed;
  auto* mutate = app.add_subcommand("mutate", "Generate attack and traditional mutant descriptors");
  mutate->add_option("--model", model, "Model file or bundled name")->required();
  mutate->add_option("--attacks", attacks, "all, or a comma list of A1..A5, inc");
  mutate->add_option("--traditional", traditional, "Number of seeded traditional mutants");
  mutate->add_option("--seed", seed, "Seed for traditional mutants (default: $TFSM_SEED or 1)");
  mutate->add_option("-o,--out", out_path, "Output *.mut.json (default stdout)");

  // derive
  std::string mutants_path, suite_path, matrix_path;
  int max_steps = SearchConfig{}.max_steps;
  auto* derive = app.add_subcommand("derive", "Derive a distinguishing suite and its kill matrix");
  derive->add_option("--model", model, "Model file or bundled name")->required();
  derive->add_option("--mutants", mutants_path, "Mutant set (*.mut.json)")->required();
  derive->add_option("--suite", suite_path, "Output *.suite.json (default stdout)");
  derive->add_option("--matrix", matrix_path, "Output kill matrix *.verdicts.json");
  derive->add_option("--max-steps", max_steps, "Maximum inputs per test")->check(CLI::PositiveNumber);

  // run
  std::string endpoint;
  auto* runc = app.add_subcommand("run", "Execute a suite in process or against an endpoint");
  auto* run_model = runc->add_option("--model", model, "Model file or bundled name");
  auto* run_ep = runc->add_option("--endpoint", endpoint, "host:port of a served device");
  run_model->excludes(run_ep);
  runc->add_option("--suite", suite_path, "Suite (*.suite.json)")->required();
  runc->add_option("--mutants", mutants_path, "Also run every mutant of this set (in process)");
  runc->add_option("-o,--out", out_path, "Output *.verdicts.json (default stdout)");

  // serve
  std::string bind = "127.0.0.1:7878";
  bool allow_mutate = false, debug_timeouts = false;
  auto* serve = app.add_subcommand("serve", "Serve a model as an emulated device over TCP");
  serve->add_option("--model", model, "Model file or bundled name")->required();
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_flag("--allow-mutate", allow_mutate, "Accept MUTATE requests");
  serve->add_flag("--debug-timeouts", debug_timeouts, "Log timeout firings to stderr");

  // score
  std::string verdicts_path, alive;
  auto* scorec = app.add_subcommand("score", "Print the mutation score of a kill matrix");
  scorec->add_option("--verdicts", verdicts_path, "Kill matrix (*.verdicts.json)")->required();
  scorec->add_option("--alive", alive, "Comma-separated ids of mutants known to be alive");

  // fingerprint
  auto* fp = app.add_subcommand("fingerprint", "Check a remote device by fault injection");
  fp->add_option("--endpoint", endpoint, "host:port of the suspect")->required();
  fp->add_option("--model", model, "Reference model file or bundled name")->required();
  fp->add_option("--mutants", mutants_path, "Descriptors to inject (*.mut.json)")->required();
  fp->add_option("--suite", suite_path, "Suite (*.suite.json)")->required();
  fp->add_option("-o,--out", out_path, "Output report (default stdout)");

  // report
  std::string format = "text";
  auto* report = app.add_subcommand("report", "Summarise attack counts, suite size and mutation scores");
  report->add_option("--model", model, "Model file or bundled name")->required();
  report->add_option("--mutants", mutants_path, "Attack mutant set (default: all attacks)");
  report->add_option("--traditional", traditional, "Also score the suite against N traditional mutants");
  report->add_option("--seed", seed, "Seed for traditional mutants (default: $TFSM_SEED or 1)");
  report->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      MachineDef def;
      if (std::filesystem::exists(model)) {
        def = load_doc<MachineDef>(model, parse_model_def);
      } else {
        def = parse_model_def(bundled_model_text(model));
      }
      ValidationReport r = validate_machine(def);
      if (!r.ok()) {
        err << r.to_string();
        return kInvalidInput;
      }
      out << def.id << ": ok\n";
      return kOk;
    }

    if (*mutate) {
      Machine m = load_model(model);
      if (attacks.empty() && traditional == 0) attacks = "all";
      MutantSet set;
      set.spec_id = m.id();
      if (!attacks.empty()) set = gen_attacks(m, parse_attack_list(attacks));
      if (traditional > 0) {
        MutantSet tr = gen_traditional(m, traditional, seed.value_or(default_seed()));
        set.seed = tr.seed;
        for (auto& d : tr.mutants) set.mutants.push_back(std::move(d));
      }
      for (const auto& w : set.warnings) err << "warning: " << w << "\n";
      write_output(out_path, serialize_mutants(set), out);
      return kOk;
    }

    if (*derive) {
      Machine m = load_model(model);
      MutantSet set = load_doc<MutantSet>(mutants_path, parse_mutants);
      SearchConfig cfg;
      cfg.max_steps = max_steps;
      DeriveResult r = derive_suite(m, set, cfg);
      for (const auto& id : r.undistinguished)
        err << "warning: no distinguishing test for " << id
            << (std::find(r.budget_exhausted.begin(), r.budget_exhausted.end(), id) != r.budget_exhausted.end()
                    ? " (node budget exhausted)\n"
                    : " within " + std::to_string(max_steps) + " inputs\n");
      write_output(suite_path, serialize_suite(r.suite), out);
      if (!matrix_path.empty()) write_output(matrix_path, serialize_verdicts(r.matrix), out);
      return kOk;
    }

    if (*runc) {
      if (model.empty() && endpoint.empty()) throw Error(ErrorKind::InvalidArgument, "run needs --model or --endpoint");
      Suite suite = load_doc<Suite>(suite_path, parse_suite);
      VerdictReport v;
      if (!endpoint.empty()) {
        v = wire::client_run(wire::Endpoint::parse(endpoint), suite, endpoint);
        if (!mutants_path.empty()) err << "warning: --mutants is ignored with --endpoint\n";
      } else {
        Machine m = load_model(model);
        std::vector<std::pair<std::string, Machine>> ms;
        if (!mutants_path.empty())
          for (const auto& d : load_doc<MutantSet>(mutants_path, parse_mutants).mutants)
            ms.emplace_back(d.id, apply_descriptor(m, d));
        std::vector<NamedMachine> targets{{m.id(), "spec", &m}};
        for (const auto& [id, mm] : ms) targets.push_back({id, "mutant", &mm});
        v = execute_suite(suite, targets);
      }
      write_output(out_path, serialize_verdicts(v), out);
      bool spec_failed = false, transport = false;
      for (const auto& row : v.rows) {
        auto it = std::find_if(v.targets.begin(), v.targets.end(), [&](const TargetRef& t) { return t.id == row.target; });
        if (it == v.targets.end() || it->role != "spec") continue;
        if (row.verdict.outcome == Outcome::Kill) spec_failed = true;
        if (row.verdict.outcome == Outcome::Error) {
          (row.verdict.error.find("TransportError") != std::string::npos ? transport : spec_failed) = true;
          err << "error: " << row.test << ": " << row.verdict.error << "\n";
        }
      }
      if (spec_failed) return kVerdictFailure;
      return transport ? kTransport : kOk;
    }

    if (*serve) {
      auto m = std::make_shared<const Machine>(load_model(model));
      auto server = wire::Server::start(m, wire::Endpoint::parse(bind), {allow_mutate, debug_timeouts});
      err << "serving " << m->id() << " on " << server->endpoint().to_string()
          << (allow_mutate ? " (mutation enabled)" : "") << "\n";
      server->wait();
      return kOk;
    }

    if (*scorec) {
      VerdictReport v = load_doc<VerdictReport>(verdicts_path, parse_verdicts);
      MutationScore s = score(v, split_ids(alive));
      out << s.text() << "\n";
      err << "killed " << s.killed << " of " << s.total << ", alive " << s.alive << "\n";
      return kOk;
    }

    if (*fp) {
      Machine m = load_model(model);
      MutantSet set = load_doc<MutantSet>(mutants_path, parse_mutants);
      Suite suite = load_doc<Suite>(suite_path, parse_suite);
      auto r = wire::fingerprint(wire::Endpoint::parse(endpoint), m, set, suite);
      write_output(out_path, wire::serialize_fingerprint(r), out);
      err << r.conclusion() << "\n";
      return r.consistent ? kOk : kVerdictFailure;
    }

    if (*report) {
      Machine m = load_model(model);
      MutantSet set = mutants_path.empty() ? gen_attacks(m, all_attack_kinds())
                                           : load_doc<MutantSet>(mutants_path, parse_mutants);
      ReportData data;
      data.model = m.id();
      for (MutantKind k : all_attack_kinds())
        data.counts.emplace_back(std::string(kind_tag(k)), set.count(k));
      data.mutants = set.mutants.size();
      for (const auto& w : set.warnings)
        if (w.find("reported") != std::string::npos) data.notes.push_back(w);
      DeriveResult r = derive_suite(m, set);
      data.suite_size = r.suite.tests.size();
      data.undistinguished = r.undistinguished;
      data.attack_score = score(r.matrix, {});
      if (traditional > 0) {
        std::uint64_t s = seed.value_or(default_seed());
        MutantSet tr = gen_traditional(m, traditional, s);
        std::vector<std::pair<std::string, Machine>> ms;
        for (const auto& d : tr.mutants) ms.emplace_back(d.id, apply_descriptor(m, d));
        std::vector<NamedMachine> targets{{m.id(), "spec", &m}};
        for (const auto& [id, mm] : ms) targets.push_back({id, "mutant", &mm});
        KillMatrix km = execute_suite(r.suite, targets);
        // Alive: no test of any length up to the search bound tells them apart.
        std::vector<std::string> alive_ids;
        for (const auto& [id, mm] : ms)
          if (!km.killed(id) && !distinguish(m, mm).test) alive_ids.push_back(id);
        data.traditional = score(km, alive_ids);
        data.traditional_seed = s;
      }
      out << (format == "json" ? render_json(data) : render_text(data));
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kUsage;
}

}  // namespace tfsm::cli
