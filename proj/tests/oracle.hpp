#pragma once

// Test-only oracles, kept independent of the library's computation paths.
//
// The Born-rule oracle expands <psi| P_1 x ... x P_n |psi> with explicit
// dense Kronecker products and a full matrix-vector product, instead of the
// library's in-place per-qubit projections.

#include <complex>
#include <vector>

#include "bellgames/quantum.hpp"

namespace oracle {

using cd = std::complex<double>;
using Matrix = std::vector<std::vector<cd>>;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t ar = a.size(), ac = a[0].size(), br = b.size(), bc = b[0].size();
  Matrix out(ar * br, std::vector<cd>(ac * bc));
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
  return out;
}

inline Matrix to_matrix(const bellgames::Mat2& m) {
  return {{m[0][0], m[0][1]}, {m[1][0], m[1][1]}};
}

// <psi| M |psi> for a dense matrix M; returns the real part.
inline double expectation(const std::vector<cd>& psi, const Matrix& m) {
  cd total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    cd row = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) row += m[i][j] * psi[j];
    total += std::conj(psi[i]) * row;
  }
  return total.real();
}

// P(outcomes) by the dense projector product, qubit 0 leftmost in the kron.
inline double born_probability(const bellgames::StateVector& state,
                               const std::vector<bellgames::MeasurementSetting>& settings,
                               const std::vector<int>& outcomes) {
  Matrix m = to_matrix(bellgames::outcome_projector(settings[0], outcomes[0]));
  for (std::size_t k = 1; k < settings.size(); ++k)
    m = kron(m, to_matrix(bellgames::outcome_projector(settings[k], outcomes[k])));
  return expectation(state.amplitudes, m);
}

}  // namespace oracle
