#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "tfsm/suite.hpp"
#include "tfsm/wire/protocol.hpp"
#include "tfsm/wire/socket.hpp"

namespace tfsm::wire {

/// Request/reply pairs of one connection, in order.
struct Transcript {
  std::vector<std::pair<std::string, std::string>> exchanges;
  bool operator==(const Transcript&) const = default;
};

/// "> request" and "< reply" lines.
std::string format_transcript(const Transcript& t);
Transcript parse_transcript(std::string_view text);  // throws Error(ProtocolError)

struct ClientOptions {
  std::chrono::milliseconds timeout{5000};
  int connect_attempts = 3;
  Transcript* record = nullptr;  // appends every exchange when set
};

/// Synchronous protocol client; every call sends one line and reads one reply.
class Client {
 public:
  Client(Endpoint endpoint, ClientOptions options = {});

  /// Connects (with retries) and performs HELLO. Throws Error(TransportError),
  /// or Error(ProtocolError) when the server refuses the model id.
  void open(const std::string& model_id);
  bool is_open() const { return socket_.is_open(); }
  void close();

  std::string request(std::string_view line);
  void reset();
  /// Throws Error(MutateUnsupported) on "ERR forbidden", Error(ProtocolError) on other refusals.
  void mutate(const std::string& descriptor_json);
  /// Observed output symbol (kEpsilon for NONE). ERR replies throw Error(ProtocolError).
  std::string input(const TimedInput& in);
  /// One test on the current session: RESET then every step.
  Verdict run_test(const TestCase& test);

 private:
  Endpoint endpoint_;
  ClientOptions options_;
  LineSocket socket_;
};

/// Runs a suite against a remote endpoint, one RESET per test, reconnecting
/// after transport failures. Failed tests get ERROR verdicts, never KILL.
/// Throws Error(TransportError) when the endpoint cannot be reached at all.
VerdictReport client_run(const Endpoint& endpoint, const Suite& suite, const std::string& target_id,
                         const std::string& role = "spec", ClientOptions options = {});

/// Sends the recorded requests over a fresh connection and returns the replies.
Transcript replay_transcript(const Endpoint& endpoint, const Transcript& recorded, ClientOptions options = {});

}  // namespace tfsm::wire
