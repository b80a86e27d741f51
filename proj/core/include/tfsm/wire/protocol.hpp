#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tfsm/engine.hpp"

namespace tfsm::wire {

// Line grammar (LF-terminated):
//   client: HELLO <model-id> | RESET | INPUT <symbol>[ <param>] AT <ms> | MUTATE <descriptor-json> | END
//   server: OK[ <model-id>] | OUTPUT <symbol> AT <ms> | NONE AT <ms> | ERR <code> <detail>
// String parameters are double-quoted with backslash escapes.

std::string format_input(const TimedInput& in);
/// Throws Error(ProtocolError) on malformed lines.
TimedInput parse_input(std::string_view line);

struct Reply {
  enum class Kind { Ok, Output, None, Err };
  Kind kind = Kind::Ok;
  std::string arg;  // model id for OK, symbol for OUTPUT, code for ERR
  Millis at = 0;    // OUTPUT and NONE
  std::string detail;
};

/// Throws Error(ProtocolError) on malformed lines.
Reply parse_reply(std::string_view line);

struct SessionOptions {
  bool allow_mutate = false;
  std::ostream* timeout_log = nullptr;  // logs timeout firings when set
};

/// Protocol state of one connection, independent of any socket.
class SessionHandler {
 public:
  SessionHandler(std::shared_ptr<const Machine> spec, SessionOptions options = {});

  /// Exactly one reply line per request line.
  std::string handle_line(std::string_view line);
  bool closed() const { return closed_; }

 private:
  std::string on_hello(std::string_view rest);
  std::string on_input(std::string_view line);
  std::string on_mutate(std::string_view rest);
  void reset();

  std::shared_ptr<const Machine> spec_;
  std::shared_ptr<const Machine> machine_;
  SessionOptions options_;
  Configuration config_;
  std::optional<Millis> last_at_;
  bool greeted_ = false;
  bool closed_ = false;
};

}  // namespace tfsm::wire
