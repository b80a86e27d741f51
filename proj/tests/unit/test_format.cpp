#include <gtest/gtest.h>

#include <functional>

#include "model_text.hpp"
#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"

using namespace tfsm;
using tfsm::testing::model_doc;

namespace {

const char* kSmall = R"({
  "id": "small", "initial": "A",
  "states": [{"name": "A", "label": "idle"}, {"name": "B"}],
  "inputs": [{"name": "a"}, {"name": "n", "param_kind": "int", "param_name": "v"}],
  "outputs": [{"name": "x"}],
  "variables": [{"name": "k", "kind": "int", "init": 0}],
  "timeouts": [{"state": "A", "t_out": 1500, "dst": "B"}, {"state": "B", "t_out": "INFINITE"}],
  "transitions": [
    {"id": "t1", "src": "A", "input": "a", "output": "x", "dst": "A"},
    {"id": "t2", "src": "B", "input": "n", "guard": "v > 2", "updates": ["k := k + v"], "output": "eps", "dst": "A"}
  ]})";

ErrorKind kind_of_failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::ProtocolError;
}

std::string message_of_failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Format, ModelRoundTripIsCanonical) {
  MachineDef def = parse_model_def(model_doc(kSmall));
  std::string text = serialize_model(def);
  EXPECT_EQ(parse_model_def(text), def);
  EXPECT_EQ(serialize_model(parse_model_def(text)), text);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(def.find_timeout("B")->t_out, kInfinite);
  EXPECT_EQ(def.find_timeout("B")->dst, "B");
}

TEST(Format, BundledModelsAreValidAndCanonical) {
  auto names = bundled_model_names();
  EXPECT_EQ(names, (std::vector<std::string>{"motion_sensor", "ultrasonic", "rfid"}));
  for (const auto& n : names) {
    std::string_view text = bundled_model_text(n);
    Machine m = load_bundled(n);
    EXPECT_EQ(m.id(), n);
    EXPECT_TRUE(validate_machine(m.def()).ok());
    EXPECT_EQ(serialize_model(m.def()), std::string(text)) << n;
  }
  EXPECT_EQ(kind_of_failure([] { load_bundled("toaster"); }), ErrorKind::UnknownModel);
}

TEST(Format, MalformedJsonReportsLineAndColumn) {
  std::string text = "{\n  \"schema\": \"tfsm/1\",\n  \"machine\": {,\n}";
  EXPECT_EQ(kind_of_failure([&] { parse_model_def(text); }), ErrorKind::SyntaxError);
  EXPECT_NE(message_of_failure([&] { parse_model_def(text); }).find("line 3, column 15"), std::string::npos);
}

TEST(Format, UnknownFieldsAndWrongShapesAreSchemaErrors) {
  std::string extra = model_doc(kSmall);
  extra.insert(extra.size() - 1, R"(,"colour":"red")");
  EXPECT_EQ(kind_of_failure([&] { parse_model_def(extra); }), ErrorKind::SchemaError);
  EXPECT_NE(message_of_failure([&] { parse_model_def(extra); }).find("colour"), std::string::npos);

  std::string bad_timeout = model_doc(kSmall);
  bad_timeout.replace(bad_timeout.find("1500"), 4, "\"soon\"");
  std::string msg = message_of_failure([&] { parse_model_def(bad_timeout); });
  EXPECT_NE(msg.find("machine.timeouts[0].t_out"), std::string::npos) << msg;

  EXPECT_EQ(kind_of_failure([] { parse_model_def(R"({"schema":"tfsm/2","machine":{}})"); }), ErrorKind::SchemaError);
}

TEST(Format, GuardTypeErrorsAreSchemaErrors) {
  std::string text = model_doc(kSmall);
  text.replace(text.find("v > 2"), 5, "v > 'a'");
  EXPECT_EQ(kind_of_failure([&] { parse_model(text); }), ErrorKind::SchemaError);
  EXPECT_NE(message_of_failure([&] { parse_model(text); }).find("type"), std::string::npos);
}

TEST(Format, StructuralViolationsAreSemanticErrors) {
  std::string text = model_doc(kSmall);
  text.replace(text.find(R"("dst": "A"})"), 11, R"("dst": "Q"})");
  EXPECT_EQ(kind_of_failure([&] { parse_model(text); }), ErrorKind::SemanticError);
}

TEST(Format, SuiteAndVerdictsRoundTrip) {
  Suite s{"demo-attacks", "demo", {}};
  s.tests.push_back({"T01", "A3-001", {{"a", std::nullopt, 1000, "x"}, {"n", Value(std::int64_t{4}), 2500, "eps"}}});
  s.tests.push_back({"T02", "", {{"d", Value(std::string("q\"z")), 5, "o"}}});
  EXPECT_EQ(parse_suite(serialize_suite(s)), s);

  VerdictReport r{"demo-attacks", {{"demo", "spec"}, {"A3-001", "mutant"}}, {}};
  r.rows.push_back({"T01", "demo", Verdict{Outcome::Pass, std::nullopt, {"x", "eps"}, ""}});
  r.rows.push_back({"T01", "A3-001", Verdict{Outcome::Kill, 0, {"o6", "eps"}, ""}});
  r.rows.push_back({"T02", "A3-001", Verdict{Outcome::Error, std::nullopt, {}, "time-travel"}});
  EXPECT_EQ(parse_verdicts(serialize_verdicts(r)), r);
  EXPECT_TRUE(r.killed("A3-001"));
  EXPECT_FALSE(r.killed("demo"));
}

TEST(Format, MutantsAndDescriptorsRoundTrip) {
  Machine m = load_bundled("rfid");
  MutantSet attacks = gen_attacks(m, all_attack_kinds());
  EXPECT_EQ(parse_mutants(serialize_mutants(attacks)), attacks);
  MutantSet trad = gen_traditional(m, 25, 7);
  EXPECT_EQ(parse_mutants(serialize_mutants(trad)), trad);
  for (const auto& d : attacks.mutants) {
    std::string line = serialize_descriptor(d);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(parse_descriptor(line), d);
  }
}
