#include "tfsm/wire/protocol.hpp"

#include <charconv>

#include "tfsm/format.hpp"
#include "tfsm/mutation.hpp"

namespace tfsm::wire {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::ProtocolError, what); }

struct Token {
  std::string text;
  bool quoted = false;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ') {
      ++i;
      continue;
    }
    Token t;
    if (line[i] == '"') {
      t.quoted = true;
      ++i;
      bool done = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '"') {
          done = true;
          break;
        }
        if (c == '\\') {
          if (i >= line.size()) malformed("dangling escape");
          char e = line[i++];
          switch (e) {
            case 'n': t.text.push_back('\n'); break;
            case 'r': t.text.push_back('\r'); break;
            case 't': t.text.push_back('\t'); break;
            case '"':
            case '\\': t.text.push_back(e); break;
            default: malformed(std::string("unknown escape \\") + e);
          }
        } else {
          t.text.push_back(c);
        }
      }
      if (!done) malformed("unterminated string");
      if (i < line.size() && line[i] != ' ') malformed("junk after string");
    } else {
      while (i < line.size() && line[i] != ' ') t.text.push_back(line[i++]);
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

Millis parse_ms(const Token& t) {
  std::int64_t v = 0;
  if (t.quoted || t.text.empty() || t.text[0] == '-' || t.text[0] == '+' || !parse_int(t.text, v))
    malformed("time must be a non-negative base-10 integer, got '" + t.text + "'");
  return v;
}

std::string one_line(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  return text;
}

std::string err(std::string_view code, const std::string& detail) {
  return "ERR " + std::string(code) + " " + one_line(detail);
}

std::string_view verb_of(std::string_view line, std::string_view& rest) {
  auto sp = line.find(' ');
  rest = sp == std::string_view::npos ? std::string_view() : line.substr(sp + 1);
  return line.substr(0, sp);
}

}  // namespace

std::string format_input(const TimedInput& in) {
  std::string s = "INPUT " + in.symbol;
  if (in.param) s += " " + format_value(*in.param);
  return s + " AT " + std::to_string(in.at);
}

TimedInput parse_input(std::string_view line) {
  auto toks = tokenize(line);
  if (toks.size() < 4 || toks[0].text != "INPUT" || toks[0].quoted) malformed("expected INPUT <symbol>[ <param>] AT <ms>");
  if (toks.size() > 5) malformed("too many fields in INPUT");
  TimedInput in;
  if (toks[1].quoted || toks[1].text.empty()) malformed("input symbol must be a bare word");
  in.symbol = toks[1].text;
  std::size_t at_ix = toks.size() - 2;
  if (toks[at_ix].text != "AT" || toks[at_ix].quoted) malformed("expected AT before the timestamp");
  if (toks.size() == 5) {
    const Token& p = toks[2];
    if (p.quoted) {
      in.param = p.text;
    } else {
      std::int64_t v = 0;
      if (!parse_int(p.text, v)) malformed("parameter must be an integer or a quoted string, got '" + p.text + "'");
      in.param = v;
    }
  }
  in.at = parse_ms(toks.back());
  return in;
}

Reply parse_reply(std::string_view line) {
  std::string_view rest;
  std::string_view verb = verb_of(line, rest);
  Reply r;
  if (verb == "OK") {
    r.kind = Reply::Kind::Ok;
    r.arg = std::string(rest);
  } else if (verb == "ERR") {
    r.kind = Reply::Kind::Err;
    std::string_view detail;
    r.arg = std::string(verb_of(rest, detail));
    r.detail = std::string(detail);
    if (r.arg.empty()) malformed("ERR without code");
  } else if (verb == "OUTPUT" || verb == "NONE") {
    auto toks = tokenize(line);
    bool output = verb == "OUTPUT";
    if (toks.size() != (output ? 4u : 3u) || toks[toks.size() - 2].text != "AT")
      malformed("malformed reply '" + std::string(line) + "'");
    r.kind = output ? Reply::Kind::Output : Reply::Kind::None;
    if (output) r.arg = toks[1].text;
    r.at = parse_ms(toks.back());
  } else {
    malformed("unknown reply '" + std::string(line) + "'");
  }
  return r;
}

SessionHandler::SessionHandler(std::shared_ptr<const Machine> spec, SessionOptions options)
    : spec_(std::move(spec)), machine_(spec_), options_(options) {
  reset();
}

void SessionHandler::reset() {
  config_ = initial_configuration(*machine_);
  last_at_.reset();
}

std::string SessionHandler::handle_line(std::string_view line) {
  if (closed_) return err("syntax", "session closed");
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::string_view rest;
  std::string_view verb = verb_of(line, rest);

  if (verb == "HELLO") return on_hello(rest);
  if (verb == "END") {
    if (!rest.empty()) return err("syntax", "END takes no arguments");
    closed_ = true;
    return "OK";
  }
  if (verb != "RESET" && verb != "INPUT" && verb != "MUTATE")
    return err("syntax", "unknown command '" + std::string(verb) + "'");
  if (!greeted_) return err("handshake", "expected HELLO <model-id> first");
  if (verb == "RESET") {
    if (!rest.empty()) return err("syntax", "RESET takes no arguments");
    reset();
    return "OK";
  }
  if (verb == "MUTATE") return on_mutate(rest);
  return on_input(line);
}

std::string SessionHandler::on_hello(std::string_view rest) {
  if (rest.empty() || rest.find(' ') != std::string_view::npos)
    return err("syntax", "expected HELLO <model-id>");
  if (rest != spec_->id())
    return err("model-mismatch", "this endpoint serves '" + spec_->id() + "'");
  greeted_ = true;
  machine_ = spec_;
  reset();
  return "OK " + spec_->id();
}

std::string SessionHandler::on_input(std::string_view line) {
  TimedInput in;
  try {
    in = parse_input(line);
  } catch (const Error& e) {
    return err("syntax", e.what());
  }
  if (last_at_ && in.at <= *last_at_)
    return err("time-travel", "AT " + std::to_string(in.at) + " is not after the previous input at " +
                                  std::to_string(*last_at_));
  try {
    StepResult r = step_input(*machine_, config_, in);
    if (options_.timeout_log)
      for (const auto& f : r.firings)
        *options_.timeout_log << "timeout " << machine_->state_name(f.from) << " -> "
                              << machine_->state_name(f.to) << " at " << f.at << "\n";
    config_ = std::move(r.config);
    last_at_ = in.at;
    if (r.output == kEpsilon) return "NONE AT " + std::to_string(in.at);
    return "OUTPUT " + r.output + " AT " + std::to_string(in.at);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::UnknownInput: return err("unknown-input", e.what());
      case ErrorKind::TypeMismatch: return err("type-mismatch", e.what());
      case ErrorKind::TimeTravel: return err("time-travel", e.what());
      case ErrorKind::NondeterministicModel: return err("nondeterministic", e.what());
      default: return err("eval", e.what());
    }
  }
}

std::string SessionHandler::on_mutate(std::string_view rest) {
  if (!options_.allow_mutate) return err("forbidden", "mutation is disabled on this endpoint");
  try {
    MutantDescriptor d = parse_descriptor(rest);
    machine_ = std::make_shared<const Machine>(apply_descriptor(*spec_, d));
  } catch (const Error& e) {
    return err("mutate-failed", e.what());
  }
  reset();
  return "OK";
}

}  // namespace tfsm::wire
