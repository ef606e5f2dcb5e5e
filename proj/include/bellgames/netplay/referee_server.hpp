#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bellgames/games.hpp"
#include "bellgames/netplay/protocol.hpp"
#include "bellgames/netplay/tcp.hpp"
#include "bellgames/referee.hpp"
#include "bellgames/rng.hpp"

// Networked referee: interrogates player processes over the wire protocol.
// Questions for a round go out to every player before any answer is read; an
// answer arriving after deadline_ms, or never, scores the round as Lose.
// Answers for rounds that were already scored are dropped (a slow client just
// keeps losing); any other out-of-sequence message aborts the match.
//
// The question stream replays session 0 of the in-process scheme, so a match
// with the same master seed asks the same questions as run_experiment.

namespace bellgames::netplay {

struct MatchConfig {
  GameSpec spec;
  int rounds = 0;  // 0 resolves to the spec's session default
  int deadline_ms = 1000;
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;  // 0 picks an ephemeral port
  std::uint64_t seed = 1;
  int handshake_timeout_ms = 30000;
};

struct MatchResult {
  RunStats stats;
  Transcript transcript;
};

class RefereeServer {
 public:
  explicit RefereeServer(const MatchConfig& cfg)
      : cfg_(cfg), listener_(cfg.listen_host, cfg.listen_port) {
    if (cfg_.deadline_ms < 1) throw std::invalid_argument("deadline_ms must be at least 1");
    rounds_ = cfg_.rounds > 0 ? cfg_.rounds : cfg_.spec.session_rounds_default;
    if (rounds_ < 1) throw std::invalid_argument("rounds must be at least 1");
  }

  ~RefereeServer() { shutdown(); }

  int port() const { return listener_.port(); }

  // Runs one full match: handshake, rounds, summary. Throws ProtocolError on
  // a match-aborting violation and NetError if players never show up.
  MatchResult run() {
    try {
      accept_players();
      start_readers();
      MatchResult result = play_rounds();
      finish(result.stats);
      shutdown();
      return result;
    } catch (...) {
      shutdown();
      throw;
    }
  }

 private:
  struct InboxItem {
    enum class Kind { Message, Disconnected, Malformed };
    Kind kind = Kind::Message;
    WireMessage message;
  };

  struct Player {
    TcpStream stream;
    std::thread reader;
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<InboxItem> inbox;
    bool dead = false;  // main-thread view; readers only push
  };

  void accept_players() {
    players_.resize(cfg_.spec.num_players);
    for (auto& p : players_) p = std::make_unique<Player>();
    int registered = 0;
    const auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.handshake_timeout_ms);
    while (registered < cfg_.spec.num_players) {
      auto stream = listener_.accept(deadline);
      if (!stream) throw NetError("timed out waiting for players to connect");
      const ReadResult line = stream->read_line_for(5000);
      if (line.status != ReadStatus::Line) continue;
      try {
        const WireMessage hello = decode_message(line.line);
        if (hello.type != MessageType::Hello) throw ProtocolError("expected HELLO");
        if (hello.string_field("role") != "player") throw ProtocolError("expected role 'player'");
        if (hello.string_field("game") != cfg_.spec.name())
          throw ProtocolError("game mismatch: referee runs " + cfg_.spec.name());
        if (cfg_.spec.kind == GameKind::Necklace &&
            hello.int_field("n") != cfg_.spec.necklace_n)
          throw ProtocolError("game mismatch: referee runs N=" +
                              std::to_string(cfg_.spec.necklace_n));
        int id = hello.payload.contains("player") ? hello.int_field("player") : -1;
        if (id >= cfg_.spec.num_players) throw ProtocolError("player id out of range");
        if (id >= 0 && players_[id]->stream.valid()) throw ProtocolError("player id already taken");
        if (id < 0) {
          for (int k = 0; k < cfg_.spec.num_players; ++k)
            if (!players_[k]->stream.valid()) {
              id = k;
              break;
            }
        }
        WireMessage ack;
        ack.type = MessageType::Hello;
        ack.payload = {{"role", "referee"},
                       {"game", cfg_.spec.name()},
                       {"n", cfg_.spec.necklace_n},
                       {"player", id},
                       {"rounds", rounds_},
                       {"deadline_ms", cfg_.deadline_ms}};
        stream->send_line(encode_message(ack));
        players_[id]->stream = std::move(*stream);
        ++registered;
      } catch (const ProtocolError& e) {
        stream->send_line(encode_message(make_error(e.what())));
      }
    }
  }

  void start_readers() {
    for (auto& p : players_) {
      p->reader = std::thread([this, player = p.get()] {
        while (!stopping_) {
          const ReadResult line = player->stream.read_line_for(200);
          if (line.status == ReadStatus::Timeout) continue;
          InboxItem item;
          if (line.status == ReadStatus::Closed) {
            item.kind = InboxItem::Kind::Disconnected;
          } else {
            try {
              item.message = decode_message(line.line);
            } catch (const ProtocolError&) {
              item.kind = InboxItem::Kind::Malformed;
            }
          }
          {
            std::lock_guard<std::mutex> lock(player->mutex);
            player->inbox.push_back(item);
          }
          player->cv.notify_all();
          if (item.kind != InboxItem::Kind::Message) return;
        }
      });
    }
  }

  // Missing answers are recorded as 0; the round is lost unless every player
  // answered and the predicate holds.
  MatchResult play_rounds() {
    MatchResult result;
    Rng question_rng(derive_seed(derive_seed(cfg_.seed, 0), 0));
    std::uint64_t wins = 0;
    for (int round = 0; round < rounds_; ++round) {
      const QuestionTuple q = sample_questions(cfg_.spec, question_rng);
      for (int p = 0; p < cfg_.spec.num_players; ++p) {
        if (players_[p]->dead) continue;
        WireMessage question;
        question.type = MessageType::Question;
        question.round = round;
        question.payload = {{"q", q[p].str()}, {"deadline_ms", cfg_.deadline_ms}};
        if (!players_[p]->stream.send_line(encode_message(question))) players_[p]->dead = true;
      }
      const auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.deadline_ms);

      std::vector<int> answers(cfg_.spec.num_players, 0);
      bool complete = true;
      for (int p = 0; p < cfg_.spec.num_players; ++p) {
        const std::optional<int> a = await_answer(*players_[p], round, deadline);
        if (a)
          answers[p] = *a;
        else
          complete = false;
      }

      RoundRecord rec;
      rec.round_index = round;
      rec.questions = q;
      rec.answers = answers;
      rec.win = complete && judge(cfg_.spec, q, answers) == Outcome::Win;
      if (rec.win) ++wins;

      for (int p = 0; p < cfg_.spec.num_players; ++p) {
        if (players_[p]->dead) continue;
        WireMessage res;
        res.type = MessageType::Result;
        res.round = round;
        res.payload = {{"win", rec.win}};
        if (!players_[p]->stream.send_line(encode_message(res))) players_[p]->dead = true;
      }
      result.transcript.push_back({0, std::move(rec)});
    }

    RunStats& stats = result.stats;
    stats.total_rounds = static_cast<std::uint64_t>(rounds_);
    stats.wins = wins;
    stats.win_rate = static_cast<double>(wins) / static_cast<double>(rounds_);
    stats.num_sessions = 1;
    stats.sessions_passed = wins == stats.total_rounds ? 1 : 0;
    stats.session_pass_rate = stats.sessions_passed;
    const auto [lo, hi] = wilson_interval(stats.wins, stats.total_rounds, 1.96);
    stats.wilson_low = lo;
    stats.wilson_high = hi;
    return result;
  }

  std::optional<int> await_answer(Player& player, int round, Clock::time_point deadline) {
    if (player.dead) return std::nullopt;
    std::unique_lock<std::mutex> lock(player.mutex);
    for (;;) {
      if (player.inbox.empty()) {
        if (player.cv.wait_until(lock, deadline) == std::cv_status::timeout &&
            player.inbox.empty())
          return std::nullopt;
        continue;
      }
      const InboxItem item = player.inbox.front();
      player.inbox.pop_front();
      if (item.kind == InboxItem::Kind::Disconnected) {
        player.dead = true;
        return std::nullopt;
      }
      if (item.kind == InboxItem::Kind::Malformed) {
        lock.unlock();
        abort_match("malformed message from a player");
      }
      if (item.message.type != MessageType::Answer) {
        lock.unlock();
        abort_match("unexpected " + std::string(message_type_name(item.message.type)) +
                    " while awaiting ANSWER");
      }
      if (item.message.round == round) return item.message.sign_field("answer");
      if (item.message.round < round) continue;  // stale answer for a scored round
      lock.unlock();
      abort_match("ANSWER for round " + std::to_string(item.message.round) +
                  " does not match the outstanding question");
    }
  }

  [[noreturn]] void abort_match(const std::string& reason) {
    for (auto& p : players_) {
      if (p->stream.valid() && !p->dead) p->stream.send_line(encode_message(make_error(reason)));
    }
    throw ProtocolError(reason);
  }

  void finish(const RunStats& stats) {
    WireMessage summary;
    summary.type = MessageType::Summary;
    summary.round = rounds_;
    summary.payload = {{"stats", stats_to_json(stats)}};
    for (auto& p : players_) {
      if (p->dead) continue;
      p->stream.send_line(encode_message(summary));
    }
  }

  void shutdown() {
    stopping_ = true;
    for (auto& p : players_) {
      if (!p) continue;
      if (p->reader.joinable()) p->reader.join();
      p->stream.close();
    }
  }

  MatchConfig cfg_;
  TcpListener listener_;
  int rounds_ = 0;
  std::atomic<bool> stopping_{false};
  std::vector<std::unique_ptr<Player>> players_;
};

inline MatchResult serve_referee(const MatchConfig& cfg) {
  RefereeServer server(cfg);
  return server.run();
}

}  // namespace bellgames::netplay
