#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "multigen/net.hpp"
#include "multigen/protocol.hpp"
#include "multigen/session.hpp"

namespace multigen {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  std::uint64_t seed = 0;
  SessionOptions session;
  double action_deadline = 0.5;  // fraction of the tick period spent collecting actions
  std::string record_path;       // empty: no replay log
  std::uint64_t max_ticks = 0;   // 0: run until stop()

  void validate() const {
    if (!(session.tick_rate > 0.0)) throw Error("tick_rate must be positive");
    if (session.max_players < 1) throw Error("max_players must be at least 1");
    if (!(action_deadline >= 0.0 && action_deadline <= 1.0)) throw Error("action_deadline must lie in [0, 1]");
  }
};

struct TickTiming {
  std::vector<double> periods_ms;  // time between consecutive advance phases
  std::vector<double> cycle_ms;    // advance + readouts + serialization
};

/// Authoritative multiplayer server: one tick-loop thread owns the world,
/// connection threads only enqueue actions and drain outbound messages.
class Server {
 public:
  Server(ServerConfig cfg, WorldMap map) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (!cfg_.record_path.empty()) {
      record_.open(cfg_.record_path, std::ios::binary | std::ios::trunc);
      if (!record_) throw Error("cannot write " + cfg_.record_path);
    }
    session_ = std::make_unique<Session>(std::move(map), cfg_.seed, cfg_.session,
                                         cfg_.record_path.empty() ? nullptr : &record_);
  }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;
  ~Server() { stop(); }

  /// Binds, then starts the accept and tick threads. Returns the bound port.
  std::uint16_t start() {
    listener_ = net::listen_tcp(cfg_.host, cfg_.port);
    port_ = net::local_port(listener_);
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
    tick_thread_ = std::thread([this] { tick_loop(); });
    return port_;
  }

  /// Stops all threads, closes connections and writes the replay trailer.
  void stop() {
    if (stopped_.exchange(true)) return;
    running_ = false;
    tick_cv_.notify_all();
    if (tick_thread_.joinable()) tick_thread_.join();
    listener_.shutdown();
    if (accept_thread_.joinable()) accept_thread_.join();
    listener_.close();
    std::list<std::shared_ptr<Connection>> conns;
    {
      std::lock_guard lock(conn_mu_);
      conns.swap(connections_);
    }
    for (auto& c : conns) c->close();
    for (auto& c : conns) c->join();
    session_->finish();
    if (record_.is_open()) record_.close();
  }

  /// Blocks until the tick loop exits (max_ticks reached or stop()).
  void wait() {
    std::unique_lock lock(done_mu_);
    done_cv_.wait(lock, [this] { return tick_loop_done_; });
  }

  /// Blocks until at least `tick` has been published or the timeout elapses.
  bool wait_for_tick(std::uint64_t tick, std::chrono::milliseconds timeout) {
    std::unique_lock lock(done_mu_);
    return done_cv_.wait_for(lock, timeout, [&] { return session_->tick() >= tick || tick_loop_done_; }) &&
           session_->tick() >= tick;
  }

  bool finished() {
    std::lock_guard lock(done_mu_);
    return tick_loop_done_;
  }

  std::uint16_t port() const { return port_; }
  Session& session() { return *session_; }

  TickTiming timing() const {
    std::lock_guard lock(timing_mu_);
    return timing_;
  }

  /// Called on the tick thread after each tick, before broadcast.
  void on_tick(std::function<void(const TickOutput&)> hook) { tick_hook_ = std::move(hook); }

 private:
  class Connection {
   public:
    explicit Connection(net::Socket s) : socket_(std::move(s)) {}

    void enqueue(std::string line) {
      {
        std::lock_guard lock(mu_);
        if (closed_) return;
        line += '\n';
        outbox_.push_back(std::move(line));
      }
      cv_.notify_one();
    }

    /// Sends what is queued, then closes the socket.
    void close_after_flush() {
      {
        std::lock_guard lock(mu_);
        closing_ = true;
      }
      cv_.notify_one();
    }

    void close() {
      {
        std::lock_guard lock(mu_);
        closed_ = true;
        closing_ = true;
      }
      cv_.notify_one();
      socket_.shutdown();
    }

    bool closed() const {
      std::lock_guard lock(mu_);
      return closed_;
    }

    void join() {
      if (reader.joinable()) reader.join();
      if (writer.joinable()) writer.join();
    }

    void write_loop() {
      for (;;) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !outbox_.empty() || closing_; });
        if (outbox_.empty()) break;
        std::string line = std::move(outbox_.front());
        outbox_.pop_front();
        lock.unlock();
        if (!net::send_all(socket_.fd(), line)) break;
      }
      {
        std::lock_guard lock(mu_);
        closed_ = true;
      }
      socket_.shutdown();
    }

    int fd() const { return socket_.fd(); }

    std::thread reader;
    std::thread writer;
    std::optional<PlayerId> player;

   private:
    net::Socket socket_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::string> outbox_;
    bool closing_ = false;
    bool closed_ = false;
  };

  void accept_loop() {
    while (running_) {
      const int fd = ::accept(listener_.fd(), nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        break;  // listener shut down
      }
      if (!running_) {
        ::close(fd);
        break;
      }
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      auto conn = std::make_shared<Connection>(net::Socket(fd));
      conn->writer = std::thread([conn] { conn->write_loop(); });
      conn->reader = std::thread([this, conn] { read_loop(conn); });
      std::lock_guard lock(conn_mu_);
      connections_.push_back(conn);
    }
  }

  void read_loop(const std::shared_ptr<Connection>& conn) {
    net::LineReader reader(conn->fd());
    bool joined = false;
    auto reject = [&](const std::string& code, const std::string& detail) {
      conn->enqueue(encode_error(code, detail));
      conn->close_after_flush();
    };
    while (auto line = reader.next()) {
      if (line->empty()) continue;
      ClientMessage msg;
      try {
        msg = parse_client_message(*line);
      } catch (const ProtocolError& e) {
        reject(e.code(), e.what());
        break;
      }
      if (!joined) {
        if (!std::holds_alternative<JoinRequest>(msg)) {
          reject("protocol", "first message must be join");
          break;
        }
        JoinResult r = session_->join();
        if (!r.id) {
          reject(r.error_code, "server is full");
          break;
        }
        {
          // Registering under the broadcast lock keeps joined ahead of any tick_update.
          std::lock_guard lock(conn_mu_);
          conn->enqueue(session_->joined_message(*r.id));
          conn->player = r.id;
        }
        joined = true;
        continue;
      }
      if (std::holds_alternative<ByeMessage>(msg)) {
        conn->enqueue(encode_bye());
        conn->close_after_flush();
        break;
      }
      if (std::holds_alternative<JoinRequest>(msg)) {
        reject("protocol", "already joined");
        break;
      }
      session_->submit(*conn->player, std::get<ActionMessage>(msg).action);
    }
    if (reader.overflowed()) reject("protocol", "line too long");
    if (joined) {
      std::lock_guard lock(conn_mu_);
      session_->leave(*conn->player);
      conn->player.reset();
    }
    conn->close_after_flush();
  }

  void reap_closed() {
    std::list<std::shared_ptr<Connection>> dead;
    {
      std::lock_guard lock(conn_mu_);
      for (auto it = connections_.begin(); it != connections_.end();) {
        if ((*it)->closed() && !(*it)->player) {
          dead.push_back(*it);
          it = connections_.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& c : dead) {
      c->close();
      c->join();
    }
  }

  void tick_loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / cfg_.session.tick_rate));
    const auto collect = std::chrono::duration_cast<clock::duration>(period * cfg_.action_deadline);
    auto tick_start = clock::now();
    std::optional<clock::time_point> last_advance;

    while (running_) {
      if (!sleep_until(tick_start + collect)) break;
      const auto advance_at = clock::now();
      TickOutput out = session_->step();
      const auto cycle_end = clock::now();
      {
        std::lock_guard lock(timing_mu_);
        if (last_advance) timing_.periods_ms.push_back(std::chrono::duration<double, std::milli>(advance_at - *last_advance).count());
        timing_.cycle_ms.push_back(std::chrono::duration<double, std::milli>(cycle_end - advance_at).count());
      }
      last_advance = advance_at;
      if (tick_hook_) tick_hook_(out);
      {
        std::lock_guard lock(conn_mu_);
        for (auto& c : connections_) {
          if (!c->player) continue;
          if (auto it = out.messages.find(*c->player); it != out.messages.end()) c->enqueue(it->second);
        }
      }
      done_cv_.notify_all();
      reap_closed();
      if (cfg_.max_ticks != 0 && out.tick >= cfg_.max_ticks) break;

      tick_start += period;
      // Fell more than a period behind: resynchronise instead of bursting.
      if (clock::now() > tick_start + period) tick_start = clock::now();
    }
    {
      std::lock_guard lock(done_mu_);
      tick_loop_done_ = true;
    }
    done_cv_.notify_all();
  }

  /// Interruptible sleep; false once the server is stopping.
  bool sleep_until(std::chrono::steady_clock::time_point t) {
    std::unique_lock lock(tick_mu_);
    tick_cv_.wait_until(lock, t, [this] { return !running_; });
    return running_.load();
  }

  ServerConfig cfg_;
  std::ofstream record_;
  std::unique_ptr<Session> session_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopped_{false};

  std::thread accept_thread_;
  std::thread tick_thread_;
  std::mutex tick_mu_;
  std::condition_variable tick_cv_;

  std::mutex conn_mu_;
  std::list<std::shared_ptr<Connection>> connections_;

  mutable std::mutex timing_mu_;
  TickTiming timing_;
  std::function<void(const TickOutput&)> tick_hook_;

  std::mutex done_mu_;
  std::condition_variable done_cv_;
  bool tick_loop_done_ = false;
};

}  // namespace multigen
