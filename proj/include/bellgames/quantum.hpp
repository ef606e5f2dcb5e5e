#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellgames/rng.hpp"

// Exact quantum mechanics for 2- and 3-qubit systems: entangled state
// construction, spin observables, Born-rule joint outcome distributions and
// seeded sampling. Everything is plain dense arithmetic on 4- or 8-entry
// amplitude vectors.

namespace bellgames {

using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kProbClip = 1e-15;

// Basis index convention: amplitude index is the computational-basis
// bitstring with qubit 0 as the most significant bit, so for two qubits the
// order is |00>, |01>, |10>, |11>.
struct StateVector {
  int num_qubits = 0;
  std::vector<Amplitude> amplitudes;

  StateVector(int n, std::vector<Amplitude> amps)
      : num_qubits(n), amplitudes(std::move(amps)) {
    if (n < 1 || n > 3) throw std::invalid_argument("StateVector: unsupported qubit count");
    if (amplitudes.size() != (std::size_t{1} << n))
      throw std::invalid_argument("StateVector: amplitude count must be 2^n");
    for (const auto& a : amplitudes)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::invalid_argument("StateVector: non-finite amplitude");
    if (std::abs(squared_norm() - 1.0) > kNormTolerance)
      throw std::invalid_argument("StateVector: not normalized");
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }
};

enum class EntangledKind { Singlet, GhzMinus };

// Singlet (|01> - |10>)/sqrt(2); GHZ as (|000> - |111>)/sqrt(2). The GHZ sign
// makes the state the simultaneous eigenstate with XXX -> -1 and
// XYY, YXY, YYX -> +1.
inline StateVector make_entangled_state(EntangledKind kind) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case EntangledKind::Singlet:
      return StateVector(2, {Amplitude(0), Amplitude(r), Amplitude(-r), Amplitude(0)});
    case EntangledKind::GhzMinus:
      return StateVector(3, {Amplitude(r), Amplitude(0), Amplitude(0), Amplitude(0),
                             Amplitude(0), Amplitude(0), Amplitude(0), Amplitude(-r)});
  }
  throw std::invalid_argument("make_entangled_state: unknown kind");
}

enum class Basis { PauliX, PauliY, PlanarXZ };

struct MeasurementSetting {
  Basis basis = Basis::PauliX;
  double theta = 0.0;  // used by PlanarXZ only; angle from the z axis, in [0, 2*pi)

  static MeasurementSetting pauli_x() { return {Basis::PauliX, 0.0}; }
  static MeasurementSetting pauli_y() { return {Basis::PauliY, 0.0}; }
  static MeasurementSetting planar_xz(double theta) {
    const double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0) t += two_pi;
    return {Basis::PlanarXZ, t};
  }

  bool operator==(const MeasurementSetting& o) const {
    return basis == o.basis && (basis != Basis::PlanarXZ || theta == o.theta);
  }
};

using Mat2 = std::array<std::array<Amplitude, 2>, 2>;

// The +-1-valued spin observable for a setting. PlanarXZ(theta) is
// sin(theta)*sigma_x + cos(theta)*sigma_z.
inline Mat2 setting_observable(const MeasurementSetting& s) {
  const Amplitude i(0.0, 1.0);
  switch (s.basis) {
    case Basis::PauliX:
      return {{{Amplitude(0), Amplitude(1)}, {Amplitude(1), Amplitude(0)}}};
    case Basis::PauliY:
      return {{{Amplitude(0), -i}, {i, Amplitude(0)}}};
    case Basis::PlanarXZ: {
      const double c = std::cos(s.theta), sn = std::sin(s.theta);
      return {{{Amplitude(c), Amplitude(sn)}, {Amplitude(sn), Amplitude(-c)}}};
    }
  }
  throw std::invalid_argument("setting_observable: unknown basis");
}

// Projector (I + outcome * O)/2 for outcome = +-1.
inline Mat2 outcome_projector(const MeasurementSetting& s, int outcome) {
  if (outcome != 1 && outcome != -1)
    throw std::invalid_argument("outcome_projector: outcome must be +-1");
  Mat2 o = setting_observable(s);
  const double half = 0.5 * outcome;
  return {{{0.5 + half * o[0][0], half * o[0][1]}, {half * o[1][0], 0.5 + half * o[1][1]}}};
}

struct OutcomeTuple {
  std::vector<int> values;  // one +-1 entry per qubit/player

  bool operator==(const OutcomeTuple& o) const { return values == o.values; }

  int product() const {
    int p = 1;
    for (int v : values) p *= v;
    return p;
  }
};

namespace detail {

// Apply a 2x2 matrix to one qubit of an (unnormalized) amplitude vector.
inline void apply_one_qubit(std::vector<Amplitude>& amps, int num_qubits, int qubit,
                            const Mat2& m) {
  const std::size_t stride = std::size_t{1} << (num_qubits - 1 - qubit);
  for (std::size_t base = 0; base < amps.size(); ++base) {
    if (base & stride) continue;
    const Amplitude a0 = amps[base];
    const Amplitude a1 = amps[base | stride];
    amps[base] = m[0][0] * a0 + m[0][1] * a1;
    amps[base | stride] = m[1][0] * a0 + m[1][1] * a1;
  }
}

inline double squared_norm(const std::vector<Amplitude>& amps) {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return s;
}

}  // namespace detail

// Joint outcome law. Entry index encodes the tuple lexicographically: bit
// (n-1-k) of the index is 0 for outcome +1 and 1 for outcome -1 on qubit k,
// so index 0 is the all-+1 tuple.
struct JointDistribution {
  int num_parties = 0;
  std::vector<double> probabilities;  // size 2^num_parties, indexed as above

  OutcomeTuple tuple_at(std::size_t index) const {
    OutcomeTuple t;
    t.values.resize(num_parties);
    for (int k = 0; k < num_parties; ++k)
      t.values[k] = (index >> (num_parties - 1 - k)) & 1 ? -1 : 1;
    return t;
  }

  std::size_t index_of(const OutcomeTuple& t) const {
    if (static_cast<int>(t.values.size()) != num_parties)
      throw std::invalid_argument("JointDistribution: tuple size mismatch");
    std::size_t idx = 0;
    for (int k = 0; k < num_parties; ++k) {
      if (t.values[k] != 1 && t.values[k] != -1)
        throw std::invalid_argument("JointDistribution: outcome must be +-1");
      if (t.values[k] == -1) idx |= std::size_t{1} << (num_parties - 1 - k);
    }
    return idx;
  }

  double probability_of(const OutcomeTuple& t) const { return probabilities[index_of(t)]; }
};

// Born rule: P(o_1..o_n) = <psi| prod_k P_k(o_k) |psi>, computed by projecting
// the state and taking the squared norm.
inline JointDistribution joint_distribution(const StateVector& state,
                                            const std::vector<MeasurementSetting>& settings) {
  if (static_cast<int>(settings.size()) != state.num_qubits)
    throw std::invalid_argument("joint_distribution: one setting per qubit required");
  const int n = state.num_qubits;
  JointDistribution d;
  d.num_parties = n;
  d.probabilities.resize(std::size_t{1} << n);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx) {
    std::vector<Amplitude> amps = state.amplitudes;
    for (int k = 0; k < n; ++k) {
      const int outcome = (idx >> (n - 1 - k)) & 1 ? -1 : 1;
      detail::apply_one_qubit(amps, n, k, outcome_projector(settings[k], outcome));
    }
    double p = detail::squared_norm(amps);
    if (p < 0.0) {
      if (p < -kProbClip) throw std::runtime_error("joint_distribution: negative probability");
      p = 0.0;
    }
    d.probabilities[idx] = p;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormTolerance)
    throw std::runtime_error("joint_distribution: probabilities do not sum to 1");
  return d;
}

// Inverse-CDF draw over the distribution's index order.
inline OutcomeTuple sample_outcome(const JointDistribution& d, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx) {
    cum += d.probabilities[idx];
    if (u < cum) return d.tuple_at(idx);
  }
  return d.tuple_at(d.probabilities.size() - 1);  // u landed in roundoff slack
}

// Draws one joint outcome coordinate-by-coordinate from a single uniform by
// nested interval subdivision: each issued outcome consumes the marginal
// conditioned on the outcomes issued so far and rescales the remaining
// uniform. Walking coordinates in index order reproduces exactly the
// lexicographic inverse-CDF draw over the joint law, and the scheme also
// serves parties one at a time, which is what the networked entanglement
// provider needs. Referee and provider share this code path so that
// in-process and networked matches agree round by round.
class ConditionalOutcomeSampler {
 public:
  ConditionalOutcomeSampler(const StateVector& state, double u)
      : num_qubits_(state.num_qubits), amps_(state.amplitudes), u_(u) {}

  // Measures `qubit` along `setting`, conditioned on everything issued so
  // far. At most one call per qubit.
  int issue(int qubit, const MeasurementSetting& setting) {
    if (qubit < 0 || qubit >= num_qubits_)
      throw std::invalid_argument("ConditionalOutcomeSampler: qubit out of range");
    if (issued_ & (1u << qubit))
      throw std::invalid_argument("ConditionalOutcomeSampler: qubit already measured");
    issued_ |= 1u << qubit;

    std::vector<Amplitude> plus = amps_;
    detail::apply_one_qubit(plus, num_qubits_, qubit, outcome_projector(setting, +1));
    const double total = detail::squared_norm(amps_);
    double p_plus = total > 0.0 ? detail::squared_norm(plus) / total : 0.0;
    p_plus = std::min(1.0, std::max(0.0, p_plus));

    int outcome;
    if (u_ < p_plus) {
      outcome = +1;
      amps_ = std::move(plus);
      u_ = p_plus > 0.0 ? u_ / p_plus : 0.0;
    } else {
      outcome = -1;
      detail::apply_one_qubit(amps_, num_qubits_, qubit, outcome_projector(setting, -1));
      u_ = p_plus < 1.0 ? (u_ - p_plus) / (1.0 - p_plus) : 0.0;
    }
    if (u_ >= 1.0) u_ = std::nextafter(1.0, 0.0);
    if (u_ < 0.0) u_ = 0.0;
    return outcome;
  }

 private:
  int num_qubits_;
  std::vector<Amplitude> amps_;  // unnormalized: projectors applied in issue order
  double u_;
  unsigned issued_ = 0;
};

// All-parties-at-once convenience over ConditionalOutcomeSampler.
inline OutcomeTuple sequential_sample_outcomes(const StateVector& state,
                                               const std::vector<MeasurementSetting>& settings,
                                               double u) {
  if (static_cast<int>(settings.size()) != state.num_qubits)
    throw std::invalid_argument("sequential_sample_outcomes: one setting per qubit required");
  ConditionalOutcomeSampler sampler(state, u);
  OutcomeTuple t;
  t.values.resize(state.num_qubits);
  for (int k = 0; k < state.num_qubits; ++k) t.values[k] = sampler.issue(k, settings[k]);
  return t;
}

}  // namespace bellgames
