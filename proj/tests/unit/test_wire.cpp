#include <gtest/gtest.h>

#include <thread>

#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"
#include "tfsm/testgen.hpp"
#include "tfsm/wire/client.hpp"
#include "tfsm/wire/fingerprint.hpp"
#include "tfsm/wire/server.hpp"

using namespace tfsm;
using namespace tfsm::wire;

namespace {

std::shared_ptr<const Machine> bundled(const char* name) { return std::make_shared<const Machine>(load_bundled(name)); }

std::unique_ptr<Server> serve(std::shared_ptr<const Machine> m, bool allow_mutate = false) {
  return Server::start(std::move(m), Endpoint{"127.0.0.1", 0}, ServeOptions{allow_mutate, false});
}

ClientOptions quick() {
  ClientOptions o;
  o.timeout = std::chrono::milliseconds(2000);
  o.connect_attempts = 2;
  return o;
}

}  // namespace

TEST(Protocol, InputLinesRoundTrip) {
  for (const TimedInput& in : {TimedInput{"i5", std::nullopt, 1200}, TimedInput{"echoPin", Value(std::int64_t{-42}), 7},
                               TimedInput{"data_byte", Value(std::string("a \"b\"\\")), 9}}) {
    EXPECT_EQ(parse_input(format_input(in)), in);
  }
  EXPECT_THROW(parse_input("INPUT i5 AT soon"), Error);
  EXPECT_THROW(parse_input("INPUT AT 5"), Error);
  Reply r = parse_reply("OUTPUT o5 AT 300");
  EXPECT_EQ(r.kind, Reply::Kind::Output);
  EXPECT_EQ(r.arg, "o5");
  EXPECT_EQ(r.at, 300);
  EXPECT_EQ(parse_reply("ERR time-travel AT 5 is late").arg, "time-travel");
}

TEST(Protocol, SessionHandshakeAndErrors) {
  SessionHandler h(bundled("motion_sensor"));
  EXPECT_EQ(h.handle_line("INPUT i1 AT 5").rfind("ERR handshake", 0), 0u);
  EXPECT_EQ(h.handle_line("HELLO rfid").rfind("ERR model-mismatch", 0), 0u);
  EXPECT_EQ(h.handle_line("HELLO motion_sensor"), "OK motion_sensor");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 500"), "OUTPUT o1 AT 500");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 500").rfind("ERR time-travel", 0), 0u);
  EXPECT_EQ(h.handle_line("INPUT i9 AT 600"), "NONE AT 600");
  EXPECT_EQ(h.handle_line("INPUT nope AT 700").rfind("ERR unknown-input", 0), 0u);
  EXPECT_EQ(h.handle_line("INPUT i1 5 AT 800").rfind("ERR type-mismatch", 0), 0u);
  EXPECT_EQ(h.handle_line("FROB").rfind("ERR syntax", 0), 0u);
  EXPECT_EQ(h.handle_line("MUTATE {}").rfind("ERR forbidden", 0), 0u);
  EXPECT_EQ(h.handle_line("RESET"), "OK");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 1"), "OUTPUT o1 AT 1");
  EXPECT_EQ(h.handle_line("END"), "OK");
  EXPECT_TRUE(h.closed());
}

TEST(Protocol, MutateReplacesTheMachineUntilTheNextMutate) {
  auto spec = bundled("motion_sensor");
  SessionHandler h(spec, SessionOptions{true, nullptr});
  h.handle_line("HELLO motion_sensor");
  MutantDescriptor d{"A3-x", MutantKind::DataFalsification, SetOutput{"t3", "o6"}};
  EXPECT_EQ(h.handle_line("MUTATE " + serialize_descriptor(d)), "OK");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 10"), "OUTPUT o6 AT 10");
  EXPECT_EQ(h.handle_line("RESET"), "OK");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 10"), "OUTPUT o6 AT 10");
  MutantDescriptor bad{"A3-y", MutantKind::DataFalsification, SetOutput{"t999", "o6"}};
  EXPECT_EQ(h.handle_line("MUTATE " + serialize_descriptor(bad)).rfind("ERR mutate-failed", 0), 0u);
  MutantDescriptor other{"A3-z", MutantKind::DataFalsification, SetOutput{"t1", "o6"}};
  EXPECT_EQ(h.handle_line("MUTATE " + serialize_descriptor(other)), "OK");
  EXPECT_EQ(h.handle_line("INPUT i1 AT 10"), "OUTPUT o1 AT 10");
}

TEST(Wire, LoopbackMatchesInProcessExecution) {
  auto spec = bundled("rfid");
  auto server = serve(spec);
  MutantSet attacks = gen_attacks(*spec, all_attack_kinds());
  Suite suite = derive_suite(*spec, attacks).suite;
  VerdictReport remote = client_run(server->endpoint(), suite, "rfid", "spec", quick());
  VerdictReport local = execute_suite(suite, {{"rfid", "spec", spec.get()}});
  EXPECT_EQ(remote, local);
}

TEST(Wire, MutatedRemoteMatchesInProcessMutant) {
  auto spec = bundled("motion_sensor");
  auto server = serve(spec, true);
  MutantSet attacks = gen_attacks(*spec, all_attack_kinds());
  Suite suite = derive_suite(*spec, attacks).suite;
  Client c(server->endpoint(), quick());
  c.open("motion_sensor");
  for (std::size_t i = 0; i < attacks.mutants.size(); i += 5) {
    const auto& d = attacks.mutants[i];
    Machine local = apply_descriptor(*spec, d);
    c.mutate(serialize_descriptor(d));
    for (const auto& t : suite.tests) EXPECT_EQ(c.run_test(t), execute(local, t)) << d.id << " " << t.id;
  }
  c.close();
}

TEST(Wire, ForbiddenMutateIsReported) {
  auto server = serve(bundled("motion_sensor"));
  Client c(server->endpoint(), quick());
  c.open("motion_sensor");
  MutantDescriptor d{"A2", MutantKind::SleepDeprivation, SetTimeout{"S10", 1}};
  try {
    c.mutate(serialize_descriptor(d));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MutateUnsupported);
  }
}

TEST(Wire, TranscriptReplayIsByteIdentical) {
  auto spec = bundled("ultrasonic");
  auto server = serve(spec);
  Suite suite = derive_suite(*spec, gen_attacks(*spec, all_attack_kinds())).suite;
  Transcript recorded;
  ClientOptions o = quick();
  o.record = &recorded;
  client_run(server->endpoint(), suite, "ultrasonic", "spec", o);
  ASSERT_FALSE(recorded.exchanges.empty());
  std::string text = format_transcript(recorded);
  EXPECT_EQ(parse_transcript(text), recorded);
  Transcript again = replay_transcript(server->endpoint(), recorded, quick());
  EXPECT_EQ(format_transcript(again), text);
}

TEST(Wire, SessionsAreIsolated) {
  auto server = serve(bundled("motion_sensor"));
  Client a(server->endpoint(), quick());
  Client b(server->endpoint(), quick());
  a.open("motion_sensor");
  b.open("motion_sensor");
  EXPECT_EQ(a.input({"i2", std::nullopt, 100}), "o2");   // a moves to S3
  EXPECT_EQ(b.input({"i3", std::nullopt, 150}), "eps");  // b is still at S1
  EXPECT_EQ(a.input({"i3", std::nullopt, 200}), "o3");
  a.close();
  b.close();
}

TEST(Wire, UnreachableEndpointIsATransportError) {
  Listener l = Listener::bind(Endpoint{"127.0.0.1", 0});
  Endpoint dead{"127.0.0.1", l.port()};
  l.close();
  Suite s{"x", "motion_sensor", {{"T01", "", {{"i1", std::nullopt, 5, "o1"}}}}};
  ClientOptions o = quick();
  o.connect_attempts = 1;
  try {
    client_run(dead, s, "motion_sensor", "spec", o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TransportError);
  }
}

TEST(Wire, DroppedConnectionGivesErrorVerdictAndReconnects) {
  // Serves HELLO then hangs up on the first INPUT of the first connection;
  // later connections behave.
  Listener l = Listener::bind(Endpoint{"127.0.0.1", 0});
  Endpoint ep{"127.0.0.1", l.port()};
  std::thread flaky([&] {
    for (int conn = 0; conn < 2; ++conn) {
      auto s = l.accept(std::chrono::milliseconds(5000));
      if (!s) return;
      SessionHandler h(std::make_shared<const Machine>(load_bundled("motion_sensor")));
      while (auto line = s->read_line()) {
        if (conn == 0 && line->rfind("INPUT", 0) == 0) break;
        s->send_line(h.handle_line(*line));
        if (h.closed()) break;
      }
    }
  });
  Suite s{"x", "motion_sensor",
          {{"T01", "", {{"i1", std::nullopt, 5, "o1"}}}, {"T02", "", {{"i2", std::nullopt, 5, "o2"}}}}};
  VerdictReport r = client_run(ep, s, "motion_sensor", "spec", quick());
  flaky.join();
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].verdict.outcome, Outcome::Error);
  EXPECT_EQ(r.rows[1].verdict.outcome, Outcome::Pass);
}

TEST(Wire, FaithfulDeviceFingerprintsConsistent) {
  auto spec = bundled("motion_sensor");
  auto server = serve(spec, true);
  MutantSet attacks = gen_attacks(*spec, all_attack_kinds());
  Suite suite = derive_suite(*spec, attacks).suite;
  FingerprintReport r = fingerprint(server->endpoint(), *spec, attacks, suite, quick());
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.conclusion(), "CONSISTENT");
  EXPECT_EQ(r.rows.size(), attacks.mutants.size());
  for (const auto& row : r.rows) EXPECT_TRUE(row.match) << row.descriptor;
}

TEST(Wire, EndpointParsing) {
  Endpoint e = Endpoint::parse("127.0.0.1:7878");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 7878);
  EXPECT_EQ(e.to_string(), "127.0.0.1:7878");
  EXPECT_THROW(Endpoint::parse("localhost"), Error);
  EXPECT_THROW(Endpoint::parse("h:99999"), Error);
}
