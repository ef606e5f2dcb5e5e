#include "bellgames/quantum.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace bellgames;

namespace {

constexpr double kTol = 1e-12;

TEST(EntangledStates, SingletAmplitudes) {
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  const double r = 1.0 / std::numbers::sqrt2;
  ASSERT_EQ(s.num_qubits, 2);
  EXPECT_NEAR(s.amplitudes[0].real(), 0.0, kTol);  // |00>
  EXPECT_NEAR(s.amplitudes[1].real(), r, kTol);    // |01>
  EXPECT_NEAR(s.amplitudes[2].real(), -r, kTol);   // |10>
  EXPECT_NEAR(s.amplitudes[3].real(), 0.0, kTol);  // |11>
  for (const auto& a : s.amplitudes) EXPECT_EQ(a.imag(), 0.0);
  EXPECT_NEAR(s.squared_norm(), 1.0, kTol);
}

TEST(EntangledStates, GhzMinusAmplitudes) {
  const StateVector s = make_entangled_state(EntangledKind::GhzMinus);
  const double r = 1.0 / std::numbers::sqrt2;
  ASSERT_EQ(s.num_qubits, 3);
  EXPECT_NEAR(s.amplitudes[0].real(), r, kTol);    // |000>
  EXPECT_NEAR(s.amplitudes[7].real(), -r, kTol);   // |111>
  for (int i = 1; i < 7; ++i) EXPECT_EQ(s.amplitudes[i], Amplitude(0.0));
  EXPECT_NEAR(s.squared_norm(), 1.0, kTol);
}

TEST(EntangledStates, RejectsBadConstruction) {
  EXPECT_THROW(StateVector(2, {Amplitude(1), Amplitude(0)}), std::invalid_argument);
  EXPECT_THROW(StateVector(2, {Amplitude(1), Amplitude(1), Amplitude(0), Amplitude(0)}),
               std::invalid_argument);
  EXPECT_THROW(StateVector(2, {Amplitude(std::nan("")), Amplitude(0), Amplitude(0), Amplitude(1)}),
               std::invalid_argument);
}

TEST(Observables, PlanarXzAtZeroIsSigmaZ) {
  const Mat2 m = setting_observable(MeasurementSetting::planar_xz(0.0));
  EXPECT_EQ(m[0][0], Amplitude(1.0));
  EXPECT_EQ(m[0][1], Amplitude(0.0));
  EXPECT_EQ(m[1][0], Amplitude(0.0));
  EXPECT_EQ(m[1][1], Amplitude(-1.0));
}

TEST(Observables, PlanarXzAtHalfPiMatchesPauliX) {
  const Mat2 planar = setting_observable(MeasurementSetting::planar_xz(std::numbers::pi / 2));
  const Mat2 pauli = setting_observable(MeasurementSetting::pauli_x());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(planar[i][j].real(), pauli[i][j].real(), kTol);
      EXPECT_NEAR(planar[i][j].imag(), pauli[i][j].imag(), kTol);
    }
}

TEST(Observables, PauliYDefinition) {
  const Mat2 m = setting_observable(MeasurementSetting::pauli_y());
  EXPECT_EQ(m[0][0], Amplitude(0.0));
  EXPECT_EQ(m[0][1], Amplitude(0.0, -1.0));
  EXPECT_EQ(m[1][0], Amplitude(0.0, 1.0));
  EXPECT_EQ(m[1][1], Amplitude(0.0));
}

TEST(Observables, HermitianWithUnitEigenvalues) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const auto check = [&](const MeasurementSetting& s) {
    const Mat2 m = setting_observable(s);
    EXPECT_EQ(m[0][1], std::conj(m[1][0]));
    EXPECT_EQ(m[0][0].imag(), 0.0);
    EXPECT_EQ(m[1][1].imag(), 0.0);
    // trace 0 and det -1 pin the eigenvalues to +-1
    EXPECT_NEAR((m[0][0] + m[1][1]).real(), 0.0, kTol);
    EXPECT_NEAR((m[0][0] * m[1][1] - m[0][1] * m[1][0]).real(), -1.0, kTol);
  };
  check(MeasurementSetting::pauli_x());
  check(MeasurementSetting::pauli_y());
  for (int i = 0; i < 50; ++i) check(MeasurementSetting::planar_xz(angle(gen)));
}

TEST(JointDistributions, SingletPerfectAnticorrelationAtEqualSettings) {
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  const auto z = MeasurementSetting::planar_xz(0.0);
  const JointDistribution d = joint_distribution(s, {z, z});
  EXPECT_NEAR(d.probability_of({{1, -1}}), 0.5, kTol);
  EXPECT_NEAR(d.probability_of({{-1, 1}}), 0.5, kTol);
  EXPECT_NEAR(d.probability_of({{1, 1}}), 0.0, kTol);
  EXPECT_NEAR(d.probability_of({{-1, -1}}), 0.0, kTol);
}

TEST(JointDistributions, SingletOrthogonalSettingsUniform) {
  // Oracle: dense projector arithmetic. P(equal) = sin^2(pi/4) = 1/2 split
  // symmetrically over the four outcomes.
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  const std::vector<MeasurementSetting> settings = {
      MeasurementSetting::planar_xz(0.0), MeasurementSetting::planar_xz(std::numbers::pi / 2)};
  const JointDistribution d = joint_distribution(s, settings);
  for (std::size_t idx = 0; idx < 4; ++idx) {
    EXPECT_NEAR(d.probabilities[idx], 0.25, kTol);
    EXPECT_NEAR(d.probabilities[idx],
                oracle::born_probability(s, settings, d.tuple_at(idx).values), kTol);
  }
}

TEST(JointDistributions, GhzTripleXHasOnlyNegativeProductOutcomes) {
  // Oracle: direct 8-amplitude expansion via the dense projector product.
  const StateVector s = make_entangled_state(EntangledKind::GhzMinus);
  const std::vector<MeasurementSetting> settings(3, MeasurementSetting::pauli_x());
  const JointDistribution d = joint_distribution(s, settings);
  for (std::size_t idx = 0; idx < 8; ++idx) {
    const OutcomeTuple t = d.tuple_at(idx);
    const double expected = t.product() == -1 ? 0.25 : 0.0;
    EXPECT_NEAR(d.probabilities[idx], expected, kTol) << "outcome index " << idx;
    EXPECT_NEAR(d.probabilities[idx], oracle::born_probability(s, settings, t.values), kTol);
  }
}

TEST(JointDistributions, MatchesDenseOracleOnRandomSettings) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> basis(0, 2);
  const auto random_setting = [&] {
    switch (basis(gen)) {
      case 0: return MeasurementSetting::pauli_x();
      case 1: return MeasurementSetting::pauli_y();
      default: return MeasurementSetting::planar_xz(angle(gen));
    }
  };
  for (const auto kind : {EntangledKind::Singlet, EntangledKind::GhzMinus}) {
    const StateVector s = make_entangled_state(kind);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<MeasurementSetting> settings;
      for (int k = 0; k < s.num_qubits; ++k) settings.push_back(random_setting());
      const JointDistribution d = joint_distribution(s, settings);
      double sum = 0.0;
      for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx) {
        EXPECT_GE(d.probabilities[idx], 0.0);
        EXPECT_NEAR(d.probabilities[idx],
                    oracle::born_probability(s, settings, d.tuple_at(idx).values), kTol);
        sum += d.probabilities[idx];
      }
      EXPECT_NEAR(sum, 1.0, kTol);
    }
  }
}

TEST(JointDistributions, RejectsSettingsLengthMismatch) {
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  EXPECT_THROW(joint_distribution(s, {MeasurementSetting::pauli_x()}), std::invalid_argument);
}

TEST(JointDistributions, SingletAngleLaw) {
  // P(equal outcomes) = sin^2((alpha - beta)/2) for 100 random angle pairs.
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    const double a = angle(gen), b = angle(gen);
    const JointDistribution d =
        joint_distribution(s, {MeasurementSetting::planar_xz(a), MeasurementSetting::planar_xz(b)});
    const double p_equal = d.probability_of({{1, 1}}) + d.probability_of({{-1, -1}});
    const double half = std::sin((a - b) / 2.0);
    EXPECT_NEAR(p_equal, half * half, kTol);
  }
}

TEST(JointDistributions, GhzStabilizerChecks) {
  const StateVector s = make_entangled_state(EntangledKind::GhzMinus);
  const auto x = MeasurementSetting::pauli_x();
  const auto y = MeasurementSetting::pauli_y();
  const auto product_mass = [&](const std::vector<MeasurementSetting>& settings, int sign) {
    const JointDistribution d = joint_distribution(s, settings);
    double mass = 0.0;
    for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx)
      if (d.tuple_at(idx).product() == sign) mass += d.probabilities[idx];
    return mass;
  };
  EXPECT_NEAR(product_mass({x, x, x}, -1), 1.0, kTol);
  EXPECT_NEAR(product_mass({x, y, y}, +1), 1.0, kTol);
  EXPECT_NEAR(product_mass({y, x, y}, +1), 1.0, kTol);
  EXPECT_NEAR(product_mass({y, y, x}, +1), 1.0, kTol);
}

TEST(Sampling, PointMassAlwaysReturnsjt) {
  JointDistribution d;
  d.num_parties = 2;
  d.probabilities = {1.0, 0.0, 0.0, 0.0};
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    const OutcomeTuple t = sample_outcome(d, rng);
    EXPECT_EQ(t.values, (std::vector<int>{1, 1}));
  }
}

TEST(Sampling, FixedSeedReproducible) {
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  const JointDistribution d = joint_distribution(
      s, {MeasurementSetting::planar_xz(0.3), MeasurementSetting::planar_xz(1.1)});
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_outcome(d, a).values, sample_outcome(d, b).values);
}

TEST(Sampling, BinomialFrequencyWithinFourSigma) {
  // {(+1,-1): 0.5, (-1,+1): 0.5}, 1e6 draws: frequency within 4 sigma of 0.5,
  // sigma = 0.5/1000.
  JointDistribution d;
  d.num_parties = 2;
  d.probabilities = {0.0, 0.5, 0.5, 0.0};
  Rng rng(2024);
  const int n = 1'000'000;
  int up_down = 0;
  for (int i = 0; i < n; ++i) {
    const OutcomeTuple t = sample_outcome(d, rng);
    const bool is_up_down = t.values[0] == 1 && t.values[1] == -1;
    const bool is_down_up = t.values[0] == -1 && t.values[1] == 1;
    ASSERT_TRUE(is_up_down || is_down_up);
    up_down += is_up_down;
  }
  const double freq = static_cast<double>(up_down) / n;
  EXPECT_NEAR(freq, 0.5, 4.0 * 0.0005);
}

TEST(Sampling, SequentialSamplerMatchesLexicographicCdfWalk) {
  // With the same uniform, issuing outcomes coordinate-by-coordinate must
  // reproduce the plain inverse-CDF draw over the joint law.
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto kind : {EntangledKind::Singlet, EntangledKind::GhzMinus}) {
    const StateVector s = make_entangled_state(kind);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<MeasurementSetting> settings;
      for (int k = 0; k < s.num_qubits; ++k) settings.push_back(MeasurementSetting::planar_xz(angle(gen)));
      const JointDistribution d = joint_distribution(s, settings);
      const double u = unif(gen);
      double cum = 0.0;
      std::size_t walk = d.probabilities.size() - 1;
      for (std::size_t idx = 0; idx < d.probabilities.size(); ++idx) {
        cum += d.probabilities[idx];
        if (u < cum) {
          walk = idx;
          break;
        }
      }
      EXPECT_EQ(sequential_sample_outcomes(s, settings, u).values, d.tuple_at(walk).values);
    }
  }
}

TEST(Sampling, SequentialSamplerRejectsDuplicateQubit) {
  const StateVector s = make_entangled_state(EntangledKind::Singlet);
  ConditionalOutcomeSampler sampler(s, 0.5);
  sampler.issue(0, MeasurementSetting::pauli_x());
  EXPECT_THROW(sampler.issue(0, MeasurementSetting::pauli_x()), std::invalid_argument);
}

}  // namespace
