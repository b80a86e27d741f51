#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"

using namespace tfsm;

namespace {

ErrorKind failure(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::ProtocolError;
}

struct Expected {
  const char* model;
  std::size_t drain, sleep, falsify, replay, mitm, increased;
};

void PrintTo(const Expected& e, std::ostream* os) { *os << e.model; }

}  // namespace

class AttackCounts : public ::testing::TestWithParam<Expected> {};

TEST_P(AttackCounts, MatchPublishedEnumeration) {
  const auto& e = GetParam();
  Machine m = load_bundled(e.model);
  MutantSet s = gen_attacks(m, all_attack_kinds());
  EXPECT_EQ(s.count(MutantKind::BatteryDrain), e.drain);
  EXPECT_EQ(s.count(MutantKind::SleepDeprivation), e.sleep);
  EXPECT_EQ(s.count(MutantKind::DataFalsification), e.falsify);
  EXPECT_EQ(s.count(MutantKind::Replay), e.replay);
  EXPECT_EQ(s.count(MutantKind::ManInTheMiddle), e.mitm);
  EXPECT_EQ(s.count(MutantKind::IncreasedTimeout), e.increased);
  EXPECT_EQ(s.spec_id, e.model);
  std::set<std::string> ids;
  for (const auto& d : s.mutants) {
    EXPECT_TRUE(ids.insert(d.id).second) << d.id;
    Machine mutant = apply_descriptor(m, d);
    EXPECT_EQ(mutant.id(), m.id());
    EXPECT_NE(mutant.def(), m.def()) << d.id;
  }
  bool total_warning = false;
  for (const auto& w : s.warnings) total_warning |= w.rfind("total:", 0) == 0;
  EXPECT_TRUE(total_warning);
}

INSTANTIATE_TEST_SUITE_P(Bundled, AttackCounts,
                         ::testing::Values(Expected{"motion_sensor", 5, 1, 7, 1, 4, 5},
                                           Expected{"ultrasonic", 7, 1, 8, 1, 4, 7},
                                           Expected{"rfid", 5, 1, 11, 1, 4, 5}),
                         [](const auto& info) { return std::string(info.param.model); });

TEST(Mutation, RfidReportsTheEightCountDiscrepancy) {
  MutantSet s = gen_attacks(load_bundled("rfid"), all_attack_kinds());
  int mentions = 0;
  for (const auto& w : s.warnings) mentions += w.find("8 are reported") != std::string::npos;
  EXPECT_EQ(mentions, 2);
}

TEST(Mutation, AttackEditsHaveDocumentedShape) {
  Machine m = load_bundled("motion_sensor");
  auto sleep = gen_sleep_deprivation(m);
  ASSERT_EQ(sleep.mutants.size(), 1u);
  EXPECT_EQ(std::get<SetTimeout>(sleep.mutants[0].edit), (SetTimeout{"S10", kSleepTimeout}));

  auto replay = gen_replay(m);
  const auto& add = std::get<AddTransition>(replay.mutants[0].edit);
  EXPECT_EQ(add.src, "S5");
  EXPECT_EQ(add.dst, "S5");
  EXPECT_EQ(add.input, "i4");
  EXPECT_EQ(add.output, "o4");

  for (const auto& d : gen_mitm(m).mutants) {
    const auto& st = std::get<AddState>(d.edit);
    EXPECT_EQ(st.t_out, kInterceptTimeout);
    EXPECT_EQ(st.back, m.def().find_transition(st.reroute)->src);
  }
  for (const auto& d : gen_data_falsification(m).mutants) EXPECT_EQ(std::get<SetOutput>(d.edit).output, "o6");
}

TEST(Mutation, ProfilelessModelsCannotGenerateAttacks) {
  MachineDef def = load_bundled("motion_sensor").def();
  def.profile.reset();
  Machine m = Machine::compile(def);
  EXPECT_EQ(failure([&] { gen_battery_drain(m); }), ErrorKind::MissingProfile);
}

TEST(Mutation, EditErrors) {
  MachineDef def = load_bundled("motion_sensor").def();
  EXPECT_EQ(failure([&] { apply_edit(def, SetTimeout{"S99", 10}); }), ErrorKind::UnknownTarget);
  EXPECT_EQ(failure([&] { apply_edit(def, SetOutput{"t11", "o5"}); }), ErrorKind::NoOp);
  EXPECT_EQ(failure([&] { apply_edit(def, SetOutput{"t11", "o42"}); }), ErrorKind::UnknownTarget);
  EXPECT_EQ(failure([&] { apply_edit(def, SetTimeout{"S1", 0}); }), ErrorKind::InvalidResult);
  AddTransition loop{"t99", "S5", "i4", "o4", "S5"};
  MachineDef once = apply_edit(def, loop);
  EXPECT_EQ(failure([&] { apply_edit(once, AddTransition{"t100", "S5", "i4", "o4", "S5"}); }), ErrorKind::Conflict);
  EXPECT_EQ(failure([&] { apply_edit(def, AddState{"S1", "t11", 10, "S5"}); }), ErrorKind::Conflict);
}

TEST(Mutation, TraditionalSweepIsSeededAndValid) {
  Machine m = load_bundled("ultrasonic");
  MutantSet a = gen_traditional(m, 40, 1234);
  MutantSet b = gen_traditional(m, 40, 1234);
  MutantSet c = gen_traditional(m, 40, 99);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.mutants, c.mutants);
  ASSERT_EQ(a.mutants.size(), 40u);
  EXPECT_EQ(a.seed, std::optional<std::uint64_t>(1234));
  EXPECT_EQ(a.mutants.front().id, "TR-001");
  std::set<std::string> edits;
  for (const auto& d : a.mutants) {
    EXPECT_FALSE(is_attack(d.kind));
    Machine mutant = apply_descriptor(m, d);
    EXPECT_TRUE(validate_machine(mutant.def()).ok());
    EXPECT_TRUE(edits.insert(serialize_model(mutant.def())).second) << "duplicate mutant " << d.id;
  }
}

TEST(Mutation, TraditionalSweepRefusesImpossibleBudgets) {
  MachineDef def;
  def.id = "tiny";
  def.states = {{"S", "", false}};
  def.initial = "S";
  def.inputs = {{"a", ValueKind::None, "", "", false}};
  def.outputs = {{"o", "", false}};
  def.timeouts = {{"S", kInfinite, "S", false}};
  def.transitions = {{"t1", "S", "a", "", {}, "o", "S", false}};
  Machine m = Machine::compile(def);
  EXPECT_EQ(failure([&] { gen_traditional(m, 1000, 1); }), ErrorKind::Exhausted);
  EXPECT_EQ(failure([&] { gen_traditional(m, 0, 1); }), ErrorKind::InvalidArgument);
}
