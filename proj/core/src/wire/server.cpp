#include "tfsm/wire/server.hpp"

#include <iostream>
#include <sstream>

namespace tfsm::wire {

std::unique_ptr<Server> Server::start(std::shared_ptr<const Machine> machine, const Endpoint& bind,
                                      ServeOptions options) {
  std::unique_ptr<Server> s(new Server());
  s->machine_ = std::move(machine);
  s->options_ = options;
  s->listener_ = Listener::bind(bind);
  s->host_ = bind.host.empty() ? "127.0.0.1" : bind.host;
  s->port_ = s->listener_.port();
  s->acceptor_ = std::thread([srv = s.get()] { srv->accept_loop(); });
  return s;
}

Server::~Server() { stop(); }

Endpoint Server::endpoint() const {
  std::string host = host_ == "0.0.0.0" ? "127.0.0.1" : host_ == "::" ? "::1" : host_;
  return {host, port_};
}

void Server::accept_loop() {
  while (!stopping_) {
    auto sock = listener_.accept(std::chrono::milliseconds(50));
    if (!sock) continue;
    std::lock_guard lock(mu_);
    // Reap finished sessions.
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->done) {
        it->thread.join();
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
    if (stopping_) break;
    sessions_.push_back(Session{std::move(*sock), {}, false});
    Session* s = &sessions_.back();
    s->thread = std::thread([this, s] {
      SessionOptions opts;
      opts.allow_mutate = options_.allow_mutate;
      std::ostringstream log;
      if (options_.debug_timeouts) opts.timeout_log = &log;
      SessionHandler handler(machine_, opts);
      try {
        while (!handler.closed()) {
          auto line = s->socket.read_line();
          if (!line) break;
          s->socket.send_line(handler.handle_line(*line));
          if (options_.debug_timeouts && log.tellp() > 0) {
            std::lock_guard g(log_mu_);
            std::cerr << log.str();
            log.str("");
          }
        }
      } catch (const Error&) {
        // peer vanished or sent an oversized line; drop the session
      }
      s->socket.shutdown();
      std::lock_guard lock(mu_);
      s->done = true;
    });
  }
}

void Server::stop() {
  if (stopping_.exchange(true)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  std::list<Session> sessions;
  {
    std::lock_guard lock(mu_);
    for (auto& s : sessions_) s.socket.shutdown();
    sessions.splice(sessions.end(), sessions_);
  }
  for (auto& s : sessions)
    if (s.thread.joinable()) s.thread.join();
}

void Server::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace tfsm::wire
