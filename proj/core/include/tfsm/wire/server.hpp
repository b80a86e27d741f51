#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "tfsm/wire/protocol.hpp"
#include "tfsm/wire/socket.hpp"

namespace tfsm::wire {

struct ServeOptions {
  bool allow_mutate = false;
  bool debug_timeouts = false;  // log firings to stderr
};

/// Emulated device: one thread per session, each with its own configuration.
class Server {
 public:
  /// Throws Error(BindError).
  static std::unique_ptr<Server> start(std::shared_ptr<const Machine> machine, const Endpoint& bind,
                                       ServeOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const;
  /// Stops accepting, closes open sessions and joins all threads.
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  Server() = default;
  void accept_loop();
  void session(int slot);

  struct Session {
    LineSocket socket;
    std::thread thread;
    bool done = false;
  };

  std::shared_ptr<const Machine> machine_;
  ServeOptions options_;
  Listener listener_;
  std::string host_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<Session> sessions_;
  std::mutex log_mu_;
};

}  // namespace tfsm::wire
