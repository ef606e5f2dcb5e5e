#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bellgames/games.hpp"
#include "bellgames/netplay/protocol.hpp"
#include "bellgames/netplay/tcp.hpp"
#include "bellgames/quantum.hpp"
#include "bellgames/rng.hpp"

// Entanglement provider: emulates the shared quantum resource for player
// processes that cannot hold halves of one simulated state. The first caller
// in a round gets an outcome from its single-party marginal; each later
// caller gets one conditioned on everything already issued, so the induced
// joint law equals the Born-rule joint distribution for the chosen settings.
//
// Per-round randomness comes from the same derivation the in-process referee
// uses (session seed -> substream 1 -> round), so a networked match replays
// an in-process run of the same master seed.

namespace bellgames::netplay {

class EntanglementProvider {
 public:
  EntanglementProvider(StateVector state, int num_parties, std::uint64_t master_seed,
                       int num_sessions = 1)
      : state_(std::move(state)), num_parties_(num_parties), num_sessions_(num_sessions) {
    if (state_.num_qubits != num_parties_)
      throw std::invalid_argument("EntanglementProvider: state size must match party count");
    outcome_bases_.reserve(num_sessions_);
    for (int s = 0; s < num_sessions_; ++s)
      outcome_bases_.push_back(derive_seed(derive_seed(master_seed, s), 1));
  }

  int num_parties() const { return num_parties_; }

  // Measures `player`'s share in `round` of `session`. At most one call per
  // (session, round, player).
  int measure(int session, int round, int player, const MeasurementSetting& setting) {
    if (session < 0 || session >= num_sessions_)
      throw std::invalid_argument("provider: unknown session");
    if (round < 0) throw std::invalid_argument("provider: negative round");
    if (player < 0 || player >= num_parties_)
      throw std::invalid_argument("provider: player out of range");

    std::lock_guard<std::mutex> lock(mutex_);
    const Key key{session, round};
    auto it = rounds_.find(key);
    if (it == rounds_.end()) {
      const double u = uniform_from_seed(derive_seed(outcome_bases_[session], round));
      it = rounds_.emplace(key, RoundState{ConditionalOutcomeSampler(state_, u), 0, 0}).first;
    }
    RoundState& rs = it->second;
    if (rs.served_mask & (1u << player))
      throw std::invalid_argument("provider: duplicate measurement for this round and player");
    rs.served_mask |= 1u << player;
    const int outcome = rs.sampler.issue(player, setting);
    if (++rs.served_count == num_parties_) rounds_.erase(it);
    return outcome;
  }

 private:
  using Key = std::pair<int, int>;
  struct RoundState {
    ConditionalOutcomeSampler sampler;
    unsigned served_mask;
    int served_count;
  };

  StateVector state_;
  int num_parties_;
  int num_sessions_;
  std::vector<std::uint64_t> outcome_bases_;
  std::mutex mutex_;
  std::map<Key, RoundState> rounds_;
};

// Canonical shared state for a game's quantum strategy.
inline StateVector canonical_state_for(const GameSpec& spec) {
  return make_entangled_state(spec.kind == GameKind::Ghz ? EntangledKind::GhzMinus
                                                         : EntangledKind::Singlet);
}

struct ProviderConfig {
  GameSpec spec;
  std::uint64_t seed = 1;
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;  // 0 picks an ephemeral port
  int num_sessions = 1;
};

// TCP front end. Construct, read port(), then run() (blocking) or
// start()/stop() from another thread.
class ProviderServer {
 public:
  explicit ProviderServer(const ProviderConfig& cfg)
      : cfg_(cfg),
        provider_(canonical_state_for(cfg.spec), cfg.spec.num_players, cfg.seed,
                  cfg.num_sessions),
        listener_(cfg.listen_host, cfg.listen_port) {}

  ~ProviderServer() { stop(); }

  int port() const { return listener_.port(); }

  void start() {
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  void stop() {
    stopping_ = true;
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : connection_threads_)
      if (t.joinable()) t.join();
    connection_threads_.clear();
  }

  void run() {
    start();
    if (accept_thread_.joinable()) accept_thread_.join();
  }

 private:
  void accept_loop() {
    while (!stopping_) {
      auto stream = listener_.accept(Clock::now() + std::chrono::milliseconds(200));
      if (!stream) continue;
      std::lock_guard<std::mutex> lock(threads_mutex_);
      connection_threads_.emplace_back(
          [this, s = std::move(*stream)]() mutable { serve_connection(std::move(s)); });
    }
  }

  void serve_connection(TcpStream stream) {
    int player = -1;
    int session = 0;
    try {
      const ReadResult hello_line = stream.read_line_for(30000);
      if (hello_line.status != ReadStatus::Line) return;
      const WireMessage hello = decode_message(hello_line.line);
      if (hello.type != MessageType::Hello) throw ProtocolError("expected HELLO");
      if (hello.string_field("role") != "player") throw ProtocolError("expected role 'player'");
      if (hello.string_field("game") != cfg_.spec.name())
        throw ProtocolError("game mismatch: provider serves " + cfg_.spec.name());
      if (cfg_.spec.kind == GameKind::Necklace &&
          hello.int_field("n") != cfg_.spec.necklace_n)
        throw ProtocolError("game mismatch: provider serves N=" +
                            std::to_string(cfg_.spec.necklace_n));
      player = hello.int_field("player");
      if (player < 0 || player >= provider_.num_parties())
        throw ProtocolError("player id out of range");
      session = hello.payload.contains("session") ? hello.int_field("session") : 0;
      if (session < 0 || session >= cfg_.num_sessions) throw ProtocolError("unknown session");

      WireMessage ack;
      ack.type = MessageType::Hello;
      ack.payload = {{"role", "provider"},
                     {"game", cfg_.spec.name()},
                     {"n", cfg_.spec.necklace_n},
                     {"player", player},
                     {"session", session}};
      stream.send_line(encode_message(ack));

      while (!stopping_) {
        const ReadResult line = stream.read_line_for(200);
        if (line.status == ReadStatus::Timeout) continue;
        if (line.status == ReadStatus::Closed) return;
        const WireMessage msg = decode_message(line.line);
        if (msg.type != MessageType::Measure) throw ProtocolError("expected MEASURE");
        if (msg.int_field("player") != player)
          throw ProtocolError("MEASURE player does not match the HELLO registration");
        const MeasurementSetting setting = setting_from_json(msg.field("setting"));
        int outcome;
        try {
          outcome = provider_.measure(session, msg.round, player, setting);
        } catch (const std::invalid_argument& e) {
          throw ProtocolError(e.what());
        }
        WireMessage reply;
        reply.type = MessageType::Outcome;
        reply.round = msg.round;
        reply.payload = {{"outcome", outcome}};
        stream.send_line(encode_message(reply));
      }
    } catch (const ProtocolError& e) {
      stream.send_line(encode_message(make_error(e.what())));
    } catch (const NetError&) {
      // peer vanished; nothing to report
    }
  }

  ProviderConfig cfg_;
  EntanglementProvider provider_;
  TcpListener listener_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex threads_mutex_;
  std::vector<std::thread> connection_threads_;
};

}  // namespace bellgames::netplay
