#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellgames/fraction.hpp"
#include "bellgames/rng.hpp"

// Declarative definitions of the two games: question alphabets, the
// interrogator's question distribution, and the win predicate.
//
// GHZ: three players, questions X or Y, legal tuples XXX, XYY, YXY, YYX with
// uniform weight; win iff the product of the +-1 answers is -1 for XXX and +1
// otherwise.
//
// Necklace(N): two players, questions are bead indices 1..N; the interrogator
// asks one player a bead and the other an adjacent bead (cyclically), all 2N
// ordered pairs uniform. Adjacent beads must get different colors, except the
// crossing pair {1, N} which must match. Answers are +-1, rendered green/red.

namespace bellgames {

enum class GameKind { Ghz, Necklace };

struct Question {
  enum class Kind { GhzX, GhzY, Bead };
  Kind kind = Kind::GhzX;
  int bead = 0;  // 1..N, Bead only

  static Question ghz_x() { return {Kind::GhzX, 0}; }
  static Question ghz_y() { return {Kind::GhzY, 0}; }
  static Question bead_index(int i) { return {Kind::Bead, i}; }

  bool operator==(const Question& o) const {
    return kind == o.kind && (kind != Kind::Bead || bead == o.bead);
  }

  std::string str() const {
    switch (kind) {
      case Kind::GhzX: return "X";
      case Kind::GhzY: return "Y";
      case Kind::Bead: return "bead:" + std::to_string(bead);
    }
    return "?";
  }

  static Question parse(const std::string& s) {
    if (s == "X") return ghz_x();
    if (s == "Y") return ghz_y();
    if (s.rfind("bead:", 0) == 0) {
      const int i = std::stoi(s.substr(5));
      if (i < 1) throw std::invalid_argument("Question: bead index must be positive");
      return bead_index(i);
    }
    throw std::invalid_argument("Question: unrecognized encoding '" + s + "'");
  }
};

using QuestionTuple = std::vector<Question>;

// +1 renders "green", -1 renders "red" in the necklace game.
inline const char* answer_color(int answer) { return answer == 1 ? "green" : "red"; }
inline constexpr int kGreen = 1;
inline constexpr int kRed = -1;

enum class Outcome { Win, Lose };

struct GameSpec {
  GameKind kind = GameKind::Ghz;
  int necklace_n = 0;  // N for Necklace, 0 for Ghz
  int num_players = 0;
  std::vector<QuestionTuple> legal_tuples;
  std::vector<Fraction> tuple_weights;  // uniform for both games, sums to 1 exactly
  int session_rounds_default = 0;

  std::string name() const { return kind == GameKind::Ghz ? "ghz" : "necklace"; }

  // Per-player question alphabet (identical across players in both games).
  int alphabet_size() const { return kind == GameKind::Ghz ? 2 : necklace_n; }

  int ordinal_of(const Question& q) const {
    switch (q.kind) {
      case Question::Kind::GhzX:
        if (kind == GameKind::Ghz) return 0;
        break;
      case Question::Kind::GhzY:
        if (kind == GameKind::Ghz) return 1;
        break;
      case Question::Kind::Bead:
        if (kind == GameKind::Necklace && q.bead >= 1 && q.bead <= necklace_n)
          return q.bead - 1;
        break;
    }
    throw std::invalid_argument("GameSpec: question not in this game's alphabet");
  }

  Question question_from_ordinal(int ordinal) const {
    if (ordinal < 0 || ordinal >= alphabet_size())
      throw std::invalid_argument("GameSpec: ordinal out of range");
    if (kind == GameKind::Ghz) return ordinal == 0 ? Question::ghz_x() : Question::ghz_y();
    return Question::bead_index(ordinal + 1);
  }

  bool is_legal(const QuestionTuple& q) const {
    if (static_cast<int>(q.size()) != num_players) return false;
    if (kind == GameKind::Ghz) {
      int x_count = 0;
      for (const auto& qs : q) {
        if (qs.kind == Question::Kind::GhzX)
          ++x_count;
        else if (qs.kind != Question::Kind::GhzY)
          return false;
      }
      return x_count == 3 || x_count == 1;
    }
    for (const auto& qs : q)
      if (qs.kind != Question::Kind::Bead || qs.bead < 1 || qs.bead > necklace_n) return false;
    const int i = q[0].bead, j = q[1].bead;
    const int next = i % necklace_n + 1;
    const int prev = (i + necklace_n - 2) % necklace_n + 1;
    return j == next || j == prev;
  }

  // The win predicate; total over legal tuples and +-1 answer vectors.
  Outcome predicate(const QuestionTuple& q, const std::vector<int>& answers) const {
    if (kind == GameKind::Ghz) {
      int prod = 1, x_count = 0;
      for (int k = 0; k < num_players; ++k) {
        prod *= answers[k];
        if (q[k].kind == Question::Kind::GhzX) ++x_count;
      }
      const int want = x_count == 3 ? -1 : 1;
      return prod == want ? Outcome::Win : Outcome::Lose;
    }
    const int i = q[0].bead, j = q[1].bead;
    const bool crossing = (i == 1 && j == necklace_n) || (i == necklace_n && j == 1);
    const bool equal = answers[0] == answers[1];
    return (crossing ? equal : !equal) ? Outcome::Win : Outcome::Lose;
  }
};

inline GameSpec ghz_spec() {
  GameSpec spec;
  spec.kind = GameKind::Ghz;
  spec.num_players = 3;
  const Question x = Question::ghz_x(), y = Question::ghz_y();
  spec.legal_tuples = {{x, x, x}, {x, y, y}, {y, x, y}, {y, y, x}};
  spec.tuple_weights.assign(4, Fraction(1, 4));
  spec.session_rounds_default = 1000;
  return spec;
}

inline GameSpec necklace_spec(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("necklace_spec: N must be even and at least 4");
  GameSpec spec;
  spec.kind = GameKind::Necklace;
  spec.necklace_n = n;
  spec.num_players = 2;
  for (int i = 1; i <= n; ++i)
    spec.legal_tuples.push_back({Question::bead_index(i), Question::bead_index(i % n + 1)});
  for (int i = 1; i <= n; ++i)
    spec.legal_tuples.push_back(
        {Question::bead_index(i), Question::bead_index((i + n - 2) % n + 1)});
  spec.tuple_weights.assign(spec.legal_tuples.size(),
                            Fraction(1, static_cast<std::int64_t>(spec.legal_tuples.size())));
  spec.session_rounds_default = 5 * n;
  return spec;
}

// Seed-deterministic draw from the (uniform) question distribution. The
// index form exists so every execution path consumes the rng identically.
inline std::size_t sample_question_index(const GameSpec& spec, Rng& rng) {
  return static_cast<std::size_t>(rng.bounded(spec.legal_tuples.size()));
}

inline QuestionTuple sample_questions(const GameSpec& spec, Rng& rng) {
  return spec.legal_tuples[sample_question_index(spec, rng)];
}

inline Outcome judge(const GameSpec& spec, const QuestionTuple& q,
                     const std::vector<int>& answers) {
  if (static_cast<int>(answers.size()) != spec.num_players)
    throw std::invalid_argument("judge: wrong answer count");
  for (int a : answers)
    if (a != 1 && a != -1) throw std::invalid_argument("judge: answers must be +-1");
  if (!spec.is_legal(q)) throw std::invalid_argument("judge: illegal question tuple");
  return spec.predicate(q, answers);
}

}  // namespace bellgames
