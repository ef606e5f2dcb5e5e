#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellgames/games.hpp"
#include "bellgames/rng.hpp"
#include "bellgames/strategies.hpp"

// Seeded Monte Carlo game execution: rounds, sessions, aggregates with Wilson
// confidence intervals, and no-signaling diagnostics.
//
// Randomness layout (the reproducibility contract):
//   session k of master seed S:
//     question stream   = Rng(derive_seed(derive_seed(S, k), 0))
//     outcome uniform r = uniform_from_seed(derive_seed(derive_seed(derive_seed(S, k), 1), r))
//   shared-randomness draw for round r of session k uses the strategy's own
//   seed: uniform_from_seed(derive_seed(derive_seed(strategy.seed, k), r)).
// The networked referee and entanglement provider replay session 0 of this
// scheme, which is what makes loopback matches reproduce in-process runs.

namespace bellgames {

struct SessionConfig {
  int rounds_per_session = 0;  // 0 resolves to the spec's session default
  int num_sessions = 1;
  std::uint64_t seed = 1;
};

struct RoundRecord {
  int round_index = 0;
  QuestionTuple questions;
  std::vector<int> answers;
  bool win = false;
};

struct TranscriptRow {
  int session = 0;
  RoundRecord record;
};

using Transcript = std::vector<TranscriptRow>;

struct RunStats {
  std::uint64_t total_rounds = 0;
  std::uint64_t wins = 0;
  double win_rate = 0.0;
  int num_sessions = 0;
  int sessions_passed = 0;  // a session passes iff every round is won
  double session_pass_rate = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

// Wilson score interval for a binomial proportion at z standard normal
// quantiles.
inline std::pair<double, double> wilson_interval(std::uint64_t wins, std::uint64_t n, double z) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be positive");
  if (wins > n) throw std::invalid_argument("wilson_interval: wins exceed trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(wins) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

// Answers for one round given the sampled questions. Each player's answer is
// a function of its own question and its local resource only: deterministic
// tables read one row, quantum outcome maps see one local outcome. The
// referee acts as the physics oracle that realizes the joint Born law.
inline std::vector<int> answers_for_round(const GameSpec& spec, const StrategyProfile& profile,
                                          const QuestionTuple& q, double u_outcome,
                                          double u_lambda) {
  std::vector<int> answers(spec.num_players);
  if (const auto* det = std::get_if<DeterministicStrategy>(&profile)) {
    for (int p = 0; p < spec.num_players; ++p)
      answers[p] = det->answer(p, spec.ordinal_of(q[p]));
    return answers;
  }
  if (const auto* mix = std::get_if<SharedRandomClassical>(&profile)) {
    const auto& member = mix->members[pick_weighted(mix->weights, u_lambda)];
    for (int p = 0; p < spec.num_players; ++p)
      answers[p] = member.answer(p, spec.ordinal_of(q[p]));
    return answers;
  }
  const auto& qs = std::get<QuantumStrategy>(profile);
  ConditionalOutcomeSampler sampler(qs.shared_state, u_outcome);
  for (int p = 0; p < spec.num_players; ++p) {
    const int outcome = sampler.issue(p, qs.setting_for(spec, p, q[p]));
    answers[p] = qs.map_outcome(p, outcome);
  }
  return answers;
}

}  // namespace detail

// One round with all randomness drawn from `rng`, in order: shared-randomness
// pick (mixtures only), question tuple, outcome uniform (quantum only).
inline RoundRecord run_round(const GameSpec& spec, const StrategyProfile& profile, Rng& rng,
                             int round_index = 0) {
  validate_profile(spec, profile);
  const double u_lambda =
      std::holds_alternative<SharedRandomClassical>(profile) ? rng.uniform() : 0.0;
  const QuestionTuple q = sample_questions(spec, rng);
  const double u_outcome = std::holds_alternative<QuantumStrategy>(profile) ? rng.uniform() : 0.0;
  RoundRecord rec;
  rec.round_index = round_index;
  rec.questions = q;
  rec.answers = detail::answers_for_round(spec, profile, q, u_outcome, u_lambda);
  rec.win = judge(spec, q, rec.answers) == Outcome::Win;
  return rec;
}

// Executes num_sessions x rounds_per_session rounds under the substream
// scheme above; bit-reproducible for a fixed seed, sessions independent.
inline RunStats run_experiment(const GameSpec& spec, const StrategyProfile& profile,
                               const SessionConfig& cfg, Transcript* transcript = nullptr) {
  validate_profile(spec, profile);
  const int rounds =
      cfg.rounds_per_session > 0 ? cfg.rounds_per_session : spec.session_rounds_default;
  if (rounds < 1 || cfg.num_sessions < 1)
    throw std::invalid_argument("run_experiment: rounds and sessions must be at least 1");

  const bool is_quantum = std::holds_alternative<QuantumStrategy>(profile);
  const auto* mix = std::get_if<SharedRandomClassical>(&profile);

  RunStats stats;
  stats.num_sessions = cfg.num_sessions;
  for (int session = 0; session < cfg.num_sessions; ++session) {
    const std::uint64_t session_seed = derive_seed(cfg.seed, session);
    Rng question_rng(derive_seed(session_seed, 0));
    const std::uint64_t outcome_base = derive_seed(session_seed, 1);
    const std::uint64_t lambda_base = mix ? derive_seed(mix->seed, session) : 0;

    bool all_won = true;
    for (int round = 0; round < rounds; ++round) {
      const QuestionTuple q = sample_questions(spec, question_rng);
      const double u_outcome =
          is_quantum ? uniform_from_seed(derive_seed(outcome_base, round)) : 0.0;
      const double u_lambda = mix ? uniform_from_seed(derive_seed(lambda_base, round)) : 0.0;
      RoundRecord rec;
      rec.round_index = round;
      rec.questions = q;
      rec.answers = detail::answers_for_round(spec, profile, q, u_outcome, u_lambda);
      rec.win = judge(spec, q, rec.answers) == Outcome::Win;

      ++stats.total_rounds;
      if (rec.win)
        ++stats.wins;
      else
        all_won = false;
      if (transcript) transcript->push_back({session, std::move(rec)});
    }
    if (all_won) ++stats.sessions_passed;
  }
  stats.win_rate = static_cast<double>(stats.wins) / static_cast<double>(stats.total_rounds);
  stats.session_pass_rate =
      static_cast<double>(stats.sessions_passed) / static_cast<double>(stats.num_sessions);
  const auto [lo, hi] = wilson_interval(stats.wins, stats.total_rounds, 1.96);
  stats.wilson_low = lo;
  stats.wilson_high = hi;
  return stats;
}

// ---------------------------------------------------------------------------
// No-signaling diagnostic: a player's empirical answer marginal, conditioned
// on its own question, must not depend on the other players' questions.

struct NoSignalingReport {
  std::vector<double> max_discrepancy_per_player;
  std::uint64_t samples = 0;
  std::uint64_t min_bucket_count = 0;

  // Everything below this is indistinguishable from binomial noise.
  double noise_bound() const {
    return min_bucket_count > 0 ? 5.0 / std::sqrt(static_cast<double>(min_bucket_count)) : 1.0;
  }
  bool flagged() const {
    for (double d : max_discrepancy_per_player)
      if (d > noise_bound()) return true;
    return false;
  }
};

inline NoSignalingReport analyze_no_signaling(const GameSpec& spec,
                                              const std::vector<RoundRecord>& records) {
  // counts[player][own ordinal][context key] = {rounds, +1 answers}
  using Bucket = std::pair<std::uint64_t, std::uint64_t>;
  std::vector<std::map<int, std::map<std::uint64_t, Bucket>>> counts(spec.num_players);
  for (const auto& rec : records) {
    for (int p = 0; p < spec.num_players; ++p) {
      const int own = spec.ordinal_of(rec.questions[p]);
      std::uint64_t context = 0;
      for (int o = 0; o < spec.num_players; ++o) {
        if (o == p) continue;
        context = context * static_cast<std::uint64_t>(spec.alphabet_size()) +
                  static_cast<std::uint64_t>(spec.ordinal_of(rec.questions[o]));
      }
      auto& bucket = counts[p][own][context];
      ++bucket.first;
      if (rec.answers[p] == 1) ++bucket.second;
    }
  }

  NoSignalingReport report;
  report.samples = records.size();
  report.min_bucket_count = records.empty() ? 0 : UINT64_MAX;
  report.max_discrepancy_per_player.assign(spec.num_players, 0.0);
  for (int p = 0; p < spec.num_players; ++p) {
    for (const auto& [own, contexts] : counts[p]) {
      std::vector<double> marginals;
      for (const auto& [ctx, bucket] : contexts) {
        marginals.push_back(static_cast<double>(bucket.second) /
                            static_cast<double>(bucket.first));
        report.min_bucket_count = std::min(report.min_bucket_count, bucket.first);
      }
      for (std::size_t i = 0; i < marginals.size(); ++i)
        for (std::size_t j = i + 1; j < marginals.size(); ++j)
          report.max_discrepancy_per_player[p] = std::max(
              report.max_discrepancy_per_player[p], std::abs(marginals[i] - marginals[j]));
    }
  }
  return report;
}

inline NoSignalingReport no_signaling_check(const GameSpec& spec, const StrategyProfile& profile,
                                            std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1000)
    throw std::invalid_argument("no_signaling_check: need at least 1000 samples");
  Rng rng(seed);
  std::vector<RoundRecord> records;
  records.reserve(samples);
  for (std::uint64_t i = 0; i < samples; ++i)
    records.push_back(run_round(spec, profile, rng, static_cast<int>(i)));
  return analyze_no_signaling(spec, records);
}

// ---------------------------------------------------------------------------
// Result documents: CSV transcript and a JSON stats document.

inline std::string question_csv_cell(const Question& q) {
  if (q.kind == Question::Kind::Bead) return std::to_string(q.bead);
  return q.str();
}

inline std::string transcript_to_csv(const GameSpec& spec, const Transcript& transcript) {
  std::ostringstream out;
  out << "session,round";
  for (int p = 1; p <= spec.num_players; ++p) out << ",q" << p;
  for (int p = 1; p <= spec.num_players; ++p) out << ",a" << p;
  out << ",win\n";
  for (const auto& row : transcript) {
    out << row.session << ',' << row.record.round_index;
    for (const auto& q : row.record.questions) out << ',' << question_csv_cell(q);
    for (int a : row.record.answers) out << ',' << a;
    out << ',' << (row.record.win ? 1 : 0) << '\n';
  }
  return out.str();
}

inline nlohmann::json stats_to_json(const RunStats& stats) {
  return nlohmann::json{{"total_rounds", stats.total_rounds},
                        {"wins", stats.wins},
                        {"win_rate", stats.win_rate},
                        {"num_sessions", stats.num_sessions},
                        {"sessions_passed", stats.sessions_passed},
                        {"session_pass_rate", stats.session_pass_rate},
                        {"wilson_low", stats.wilson_low},
                        {"wilson_high", stats.wilson_high}};
}

}  // namespace bellgames
