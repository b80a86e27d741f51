#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tfsm::wire {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  /// "host:port"; throws Error(InvalidArgument).
  static Endpoint parse(std::string_view text);
  std::string to_string() const;
};

/// Owning TCP stream with LF-delimited line I/O. Failures throw Error(TransportError).
class LineSocket {
 public:
  LineSocket() = default;
  explicit LineSocket(int fd) : fd_(fd) {}
  LineSocket(LineSocket&& other) noexcept;
  LineSocket& operator=(LineSocket&& other) noexcept;
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;
  ~LineSocket();

  static LineSocket connect(const Endpoint& ep, std::chrono::milliseconds timeout);

  bool is_open() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  void set_receive_timeout(std::chrono::milliseconds timeout);

  void send_line(std::string_view line);
  /// Line without its terminator; nullopt on orderly EOF.
  std::optional<std::string> read_line();
  void shutdown();
  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
};

/// Listening socket bound to host:port (port 0 picks a free port).
class Listener {
 public:
  Listener() = default;
  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  ~Listener();

  /// Throws Error(BindError).
  static Listener bind(const Endpoint& ep);

  std::uint16_t port() const { return port_; }
  /// Waits up to `timeout` for a connection.
  std::optional<LineSocket> accept(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace tfsm::wire
