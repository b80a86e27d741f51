#include "tfsm/wire/client.hpp"

#include <sstream>
#include <thread>

namespace tfsm::wire {

std::string format_transcript(const Transcript& t) {
  std::string out;
  for (const auto& [req, rep] : t.exchanges) out += "> " + req + "\n< " + rep + "\n";
  return out;
}

Transcript parse_transcript(std::string_view text) {
  Transcript t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::string> pending;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.rfind("> ", 0) == 0 && !pending) {
      pending = line.substr(2);
    } else if (line.rfind("< ", 0) == 0 && pending) {
      t.exchanges.emplace_back(std::move(*pending), line.substr(2));
      pending.reset();
    } else {
      throw Error(ErrorKind::ProtocolError, "transcript line " + std::to_string(n) + " is out of order");
    }
  }
  if (pending) throw Error(ErrorKind::ProtocolError, "transcript ends with an unanswered request");
  return t;
}

Client::Client(Endpoint endpoint, ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

void Client::open(const std::string& model_id) {
  close();
  std::string last;
  for (int attempt = 0; attempt < std::max(1, options_.connect_attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
    try {
      socket_ = LineSocket::connect(endpoint_, options_.timeout);
      break;
    } catch (const Error& e) {
      last = e.what();
    }
  }
  if (!socket_.is_open()) throw Error(ErrorKind::TransportError, last);
  Reply r = parse_reply(request("HELLO " + model_id));
  if (r.kind != Reply::Kind::Ok) {
    close();
    throw Error(ErrorKind::ProtocolError, "HELLO refused: " + r.arg + " " + r.detail);
  }
}

void Client::close() {
  if (socket_.is_open()) {
    try {
      socket_.send_line("END");
      socket_.read_line();
    } catch (const Error&) {
    }
  }
  socket_.close();
}

std::string Client::request(std::string_view line) {
  try {
    socket_.send_line(line);
    auto reply = socket_.read_line();
    if (!reply) throw Error(ErrorKind::TransportError, "connection closed by " + endpoint_.to_string());
    if (options_.record) options_.record->exchanges.emplace_back(std::string(line), *reply);
    return *reply;
  } catch (const Error&) {
    socket_.close();
    throw;
  }
}

void Client::reset() {
  Reply r = parse_reply(request("RESET"));
  if (r.kind != Reply::Kind::Ok) throw Error(ErrorKind::ProtocolError, "RESET refused: " + r.arg + " " + r.detail);
}

void Client::mutate(const std::string& descriptor_json) {
  Reply r = parse_reply(request("MUTATE " + descriptor_json));
  if (r.kind == Reply::Kind::Ok) return;
  if (r.arg == "forbidden") throw Error(ErrorKind::MutateUnsupported, endpoint_.to_string() + " refuses MUTATE");
  throw Error(ErrorKind::ProtocolError, "MUTATE refused: " + r.arg + " " + r.detail);
}

std::string Client::input(const TimedInput& in) {
  Reply r = parse_reply(request(format_input(in)));
  switch (r.kind) {
    case Reply::Kind::Output: return r.arg;
    case Reply::Kind::None: return std::string(kEpsilon);
    case Reply::Kind::Err: throw Error(ErrorKind::ProtocolError, r.arg + " " + r.detail);
    case Reply::Kind::Ok: break;
  }
  throw Error(ErrorKind::ProtocolError, "unexpected OK reply to INPUT");
}

Verdict Client::run_test(const TestCase& test) {
  reset();
  std::vector<std::string> observed;
  for (const auto& in : test.inputs()) {
    try {
      observed.push_back(input(in));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::TransportError) throw;
      Verdict v;
      v.outcome = Outcome::Error;
      v.observed = std::move(observed);
      v.error = e.what();
      return v;
    }
  }
  return compare_outputs(test, std::move(observed));
}

VerdictReport client_run(const Endpoint& endpoint, const Suite& suite, const std::string& target_id,
                         const std::string& role, ClientOptions options) {
  VerdictReport report;
  report.suite_id = suite.suite_id;
  report.targets.push_back({target_id, role});
  Client client(endpoint, options);
  client.open(suite.spec_id);  // unreachable endpoint: TransportError propagates
  for (const auto& test : suite.tests) {
    Verdict v;
    try {
      if (!client.is_open()) client.open(suite.spec_id);
      v = client.run_test(test);
    } catch (const Error& e) {
      v = Verdict{};
      v.outcome = Outcome::Error;
      v.error = e.what();
      client.close();
    }
    report.rows.push_back({test.id, target_id, std::move(v)});
  }
  client.close();
  return report;
}

Transcript replay_transcript(const Endpoint& endpoint, const Transcript& recorded, ClientOptions options) {
  Transcript out;
  options.record = nullptr;
  LineSocket s = LineSocket::connect(endpoint, options.timeout);
  for (const auto& [req, _] : recorded.exchanges) {
    s.send_line(req);
    auto reply = s.read_line();
    if (!reply) throw Error(ErrorKind::TransportError, "connection closed during replay");
    out.exchanges.emplace_back(req, *reply);
  }
  return out;
}

}  // namespace tfsm::wire
