#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bellgames/fraction.hpp"
#include "bellgames/games.hpp"
#include "bellgames/quantum.hpp"

// Strategy representations (classical deterministic, classical with shared
// randomness, quantum), exact analytic win-probability evaluation, exhaustive
// classical optimization, and the closed-form curves for the necklace game.

namespace bellgames {

// One +-1 answer per (player, question ordinal). For the necklace each
// player's row is a full 2-coloring of the beads; for GHZ it is the pair of
// answers for X and Y.
struct DeterministicStrategy {
  std::vector<std::vector<int>> answers;  // [player][question ordinal]

  int answer(int player, int question_ordinal) const {
    return answers[player][question_ordinal];
  }

  bool operator==(const DeterministicStrategy& o) const { return answers == o.answers; }
};

// A finite mixture of deterministic profiles; the seed drives which member
// the team plays in a given round (agreed before questions arrive).
struct SharedRandomClassical {
  std::vector<DeterministicStrategy> members;
  std::vector<double> weights;  // sums to 1
  std::uint64_t seed = 0;
};

// Shared entangled state, per-player measurement settings per question, and
// per-player outcome -> answer maps.
struct QuantumStrategy {
  StateVector shared_state;
  std::vector<std::vector<MeasurementSetting>> settings;  // [player][question ordinal]
  std::vector<std::array<int, 2>> outcome_map;            // [player]{answer for +1, for -1}

  MeasurementSetting setting_for(const GameSpec& spec, int player, const Question& q) const {
    return settings[player][spec.ordinal_of(q)];
  }
  int map_outcome(int player, int outcome) const {
    return outcome == 1 ? outcome_map[player][0] : outcome_map[player][1];
  }
};

using StrategyProfile = std::variant<DeterministicStrategy, SharedRandomClassical, QuantumStrategy>;

namespace detail {

// Index draw from a CDF walk over normalized weights.
inline std::size_t pick_weighted(const std::vector<double>& weights, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return weights.size() - 1;
}

}  // namespace detail

inline void validate_deterministic(const GameSpec& spec, const DeterministicStrategy& s) {
  if (static_cast<int>(s.answers.size()) != spec.num_players)
    throw std::invalid_argument("strategy: wrong player count");
  for (const auto& row : s.answers) {
    if (static_cast<int>(row.size()) != spec.alphabet_size())
      throw std::invalid_argument("strategy: answer table does not cover the question alphabet");
    for (int a : row)
      if (a != 1 && a != -1) throw std::invalid_argument("strategy: answers must be +-1");
  }
}

inline void validate_profile(const GameSpec& spec, const StrategyProfile& profile) {
  if (const auto* det = std::get_if<DeterministicStrategy>(&profile)) {
    validate_deterministic(spec, *det);
  } else if (const auto* mix = std::get_if<SharedRandomClassical>(&profile)) {
    if (mix->members.empty() || mix->members.size() != mix->weights.size())
      throw std::invalid_argument("strategy: mixture members/weights mismatch");
    double sum = 0.0;
    for (double w : mix->weights) {
      if (w < 0.0) throw std::invalid_argument("strategy: negative mixture weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("strategy: mixture weights must sum to 1");
    for (const auto& m : mix->members) validate_deterministic(spec, m);
  } else {
    const auto& q = std::get<QuantumStrategy>(profile);
    if (q.shared_state.num_qubits != spec.num_players)
      throw std::invalid_argument("strategy: shared state qubit count must equal player count");
    if (static_cast<int>(q.settings.size()) != spec.num_players ||
        static_cast<int>(q.outcome_map.size()) != spec.num_players)
      throw std::invalid_argument("strategy: wrong player count");
    for (const auto& row : q.settings)
      if (static_cast<int>(row.size()) != spec.alphabet_size())
        throw std::invalid_argument("strategy: settings do not cover the question alphabet");
    for (const auto& m : q.outcome_map)
      if ((m[0] != 1 && m[0] != -1) || (m[1] != 1 && m[1] != -1))
        throw std::invalid_argument("strategy: outcome map values must be +-1");
  }
}

// GHZ: measure sigma_x for X, sigma_y for Y, answer +1 for up on the shared
// (|000> - |111>)/sqrt(2) state.
inline QuantumStrategy canonical_quantum_ghz() {
  QuantumStrategy s{make_entangled_state(EntangledKind::GhzMinus), {}, {}};
  s.settings.assign(3, {MeasurementSetting::pauli_x(), MeasurementSetting::pauli_y()});
  s.outcome_map.assign(3, {1, -1});
  return s;
}

// Necklace: both players share the singlet; bead i is measured in the x-z
// plane at angle pi*i/N from z, up -> green, down -> red.
inline QuantumStrategy canonical_quantum_necklace(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("canonical_quantum_necklace: N must be even and at least 4");
  QuantumStrategy s{make_entangled_state(EntangledKind::Singlet), {}, {}};
  std::vector<MeasurementSetting> row;
  row.reserve(n);
  for (int i = 1; i <= n; ++i)
    row.push_back(MeasurementSetting::planar_xz(std::numbers::pi * i / n));
  s.settings.assign(2, row);
  s.outcome_map.assign(2, {kGreen, kRed});
  return s;
}

// All-+1 answers; wins XYY, YXY, YYX and loses XXX, which the 64-profile
// search certifies as optimal.
inline DeterministicStrategy best_classical_ghz() {
  DeterministicStrategy s;
  s.answers.assign(3, {1, 1});
  return s;
}

// Both players color beads alternately starting green at bead 1. Every
// adjacent pair differs, so only the crossing pair {1, N} fails: win rate
// exactly 1 - 1/N, which meets the classical failure floor of 1/N.
inline DeterministicStrategy best_classical_necklace(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("best_classical_necklace: N must be even and at least 4");
  std::vector<int> coloring(n);
  for (int i = 0; i < n; ++i) coloring[i] = i % 2 == 0 ? kGreen : kRed;
  DeterministicStrategy s;
  s.answers.assign(2, coloring);
  return s;
}

// Exact win value of a deterministic profile as a fraction of tuple weights.
inline Fraction exact_win_fraction(const GameSpec& spec, const DeterministicStrategy& s) {
  validate_deterministic(spec, s);
  Fraction total(0);
  for (std::size_t t = 0; t < spec.legal_tuples.size(); ++t) {
    const auto& q = spec.legal_tuples[t];
    std::vector<int> answers(spec.num_players);
    for (int p = 0; p < spec.num_players; ++p)
      answers[p] = s.answer(p, spec.ordinal_of(q[p]));
    if (spec.predicate(q, answers) == Outcome::Win) total = total + spec.tuple_weights[t];
  }
  return total;
}

// Analytic win probability for any profile kind. Deterministic and mixed
// profiles reduce to weighted predicate counts; quantum profiles sum the
// Born-rule mass of winning outcome tuples per question tuple.
inline double exact_win_probability(const GameSpec& spec, const StrategyProfile& profile) {
  validate_profile(spec, profile);
  if (const auto* det = std::get_if<DeterministicStrategy>(&profile))
    return exact_win_fraction(spec, *det).value();
  if (const auto* mix = std::get_if<SharedRandomClassical>(&profile)) {
    double v = 0.0;
    for (std::size_t i = 0; i < mix->members.size(); ++i)
      v += mix->weights[i] * exact_win_fraction(spec, mix->members[i]).value();
    return v;
  }
  const auto& qs = std::get<QuantumStrategy>(profile);
  double value = 0.0;
  for (std::size_t t = 0; t < spec.legal_tuples.size(); ++t) {
    const auto& q = spec.legal_tuples[t];
    std::vector<MeasurementSetting> settings(spec.num_players);
    for (int p = 0; p < spec.num_players; ++p) settings[p] = qs.setting_for(spec, p, q[p]);
    const JointDistribution d = joint_distribution(qs.shared_state, settings);
    double win_mass = 0.0;
    std::vector<int> answers(spec.num_players);
    for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx) {
      const OutcomeTuple o = d.tuple_at(idx);
      for (int p = 0; p < spec.num_players; ++p) answers[p] = qs.map_outcome(p, o.values[p]);
      if (spec.predicate(q, answers) == Outcome::Win) win_mass += d.probabilities[idx];
    }
    value += spec.tuple_weights[t].value() * win_mass;
  }
  return value;
}

struct BruteForceResult {
  Fraction value;
  DeterministicStrategy witness;  // first maximizer in enumeration order
  std::uint64_t profiles_searched = 0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = std::uint64_t{1} << 24;

// Exhaustive search over all deterministic profiles. Profiles are enumerated
// in lexicographic order of the concatenated answer tables (players in
// order, questions in ordinal order, +1 before -1), so the returned witness
// is the lexicographically smallest maximizer.
inline BruteForceResult brute_force_classical_optimum(
    const GameSpec& spec, std::uint64_t cap = kDefaultBruteForceCap) {
  const int alphabet = spec.alphabet_size();
  const int total_bits = spec.num_players * alphabet;
  if (total_bits >= 63 || (std::uint64_t{1} << total_bits) > cap)
    throw std::invalid_argument("brute_force_classical_optimum: search space exceeds cap");
  const std::uint64_t profile_count = std::uint64_t{1} << total_bits;

  // Cell (player p, ordinal o) sits at bit total_bits-1-(p*alphabet+o), so
  // counter order equals lexicographic table order; bit 0 means answer +1.
  const auto answer_of = [&](std::uint64_t counter, int p, int o) {
    const int bit = total_bits - 1 - (p * alphabet + o);
    return (counter >> bit) & 1 ? -1 : 1;
  };

  // Precomputed (player ordinal, crossing/want) views of the legal tuples.
  struct TupleView {
    std::vector<int> ordinals;
    bool ghz_all_x = false;
    bool crossing = false;
  };
  std::vector<TupleView> views;
  views.reserve(spec.legal_tuples.size());
  for (const auto& q : spec.legal_tuples) {
    TupleView v;
    for (int p = 0; p < spec.num_players; ++p) v.ordinals.push_back(spec.ordinal_of(q[p]));
    if (spec.kind == GameKind::Ghz) {
      int x_count = 0;
      for (const auto& qs : q)
        if (qs.kind == Question::Kind::GhzX) ++x_count;
      v.ghz_all_x = x_count == 3;
    } else {
      const int i = q[0].bead, j = q[1].bead;
      v.crossing = (i == 1 && j == spec.necklace_n) || (i == spec.necklace_n && j == 1);
    }
    views.push_back(std::move(v));
  }

  const auto tuple_count = static_cast<std::int64_t>(spec.legal_tuples.size());
  std::int64_t best_wins = -1;
  std::uint64_t best_counter = 0;
  for (std::uint64_t counter = 0; counter < profile_count; ++counter) {
    std::int64_t wins = 0;
    for (const auto& v : views) {
      if (spec.kind == GameKind::Ghz) {
        int prod = 1;
        for (int p = 0; p < spec.num_players; ++p) prod *= answer_of(counter, p, v.ordinals[p]);
        wins += prod == (v.ghz_all_x ? -1 : 1);
      } else {
        const bool equal =
            answer_of(counter, 0, v.ordinals[0]) == answer_of(counter, 1, v.ordinals[1]);
        wins += v.crossing ? equal : !equal;
      }
    }
    if (wins > best_wins) {
      best_wins = wins;
      best_counter = counter;
    }
  }

  BruteForceResult result{Fraction(best_wins, tuple_count), DeterministicStrategy{}, profile_count};
  result.witness.answers.assign(spec.num_players, std::vector<int>(alphabet));
  for (int p = 0; p < spec.num_players; ++p)
    for (int o = 0; o < alphabet; ++o) result.witness.answers[p][o] = answer_of(best_counter, p, o);
  return result;
}

struct ClosedFormCurves {
  double classical_round_win = 0.0;  // 1 - 1/N
  double quantum_round_fail = 0.0;   // sin^2(pi/2N)
  double eq1_classical_session = 0.0;  // (1 - 1/N)^{5N}
  double eq2_quantum_session = 0.0;    // (1 - sin^2(pi/2N))^{5N}
};

inline ClosedFormCurves closed_form_curves(int n) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("closed_form_curves: N must be even and at least 4");
  ClosedFormCurves c;
  c.classical_round_win = 1.0 - 1.0 / n;
  const double s = std::sin(std::numbers::pi / (2.0 * n));
  c.quantum_round_fail = s * s;
  c.eq1_classical_session = std::pow(c.classical_round_win, 5.0 * n);
  c.eq2_quantum_session = std::pow(1.0 - c.quantum_round_fail, 5.0 * n);
  return c;
}

// ---------------------------------------------------------------------------
// Loadable strategy file format: one player per line. Necklace lines are
// G/R strings of length N; GHZ lines are "X:+1 Y:-1" pairs.

inline std::string format_strategy(const GameSpec& spec, const DeterministicStrategy& s) {
  validate_deterministic(spec, s);
  std::ostringstream out;
  for (int p = 0; p < spec.num_players; ++p) {
    if (spec.kind == GameKind::Necklace) {
      for (int o = 0; o < spec.alphabet_size(); ++o)
        out << (s.answers[p][o] == kGreen ? 'G' : 'R');
    } else {
      out << "X:" << (s.answers[p][0] == 1 ? "+1" : "-1")
          << " Y:" << (s.answers[p][1] == 1 ? "+1" : "-1");
    }
    out << '\n';
  }
  return out.str();
}

inline DeterministicStrategy parse_strategy(const GameSpec& spec, const std::string& text) {
  std::istringstream in(text);
  DeterministicStrategy s;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    std::vector<int> row;
    if (spec.kind == GameKind::Necklace) {
      for (char c : line) {
        if (c == 'G' || c == 'g')
          row.push_back(kGreen);
        else if (c == 'R' || c == 'r')
          row.push_back(kRed);
        else
          throw std::invalid_argument("strategy file: coloring must use only G and R");
      }
    } else {
      row.assign(2, 0);
      std::istringstream tokens(line);
      std::string tok;
      while (tokens >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("strategy file: expected QUESTION:ANSWER tokens");
        const std::string q = tok.substr(0, colon), a = tok.substr(colon + 1);
        const int idx = q == "X" ? 0 : q == "Y" ? 1 : -1;
        if (idx < 0) throw std::invalid_argument("strategy file: GHZ questions are X and Y");
        if (a == "+1" || a == "1")
          row[idx] = 1;
        else if (a == "-1")
          row[idx] = -1;
        else
          throw std::invalid_argument("strategy file: answers must be +1 or -1");
      }
      if (row[0] == 0 || row[1] == 0)
        throw std::invalid_argument("strategy file: each GHZ line needs both X and Y answers");
    }
    s.answers.push_back(std::move(row));
  }
  validate_deterministic(spec, s);
  return s;
}

}  // namespace bellgames
