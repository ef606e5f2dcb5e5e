#pragma once

#include <cstdint>
#include <random>

// Seeding and substream scheme used everywhere randomness appears.
//
// All reproducibility contracts hang on this header:
//   - derive_seed(seed, k) gives independent child streams (splitmix64 mix),
//     so sessions / rounds can be derived statelessly and in parallel.
//   - Rng wraps mt19937_64 with an explicit u64 -> [0,1) mapping and an
//     unbiased bounded-integer draw, so sequences are a pure function of the
//     seed and the call sequence.
//   - uniform_from_seed(s) is a single stateless uniform; the referee and the
//     entanglement provider both use it to agree on per-round outcome
//     randomness without sharing a stream.

namespace bellgames {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Child seed for substream `index` of `seed` (splitmix64 step + finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

// One uniform in [0,1) as a pure function of a seed.
inline double uniform_from_seed(std::uint64_t seed) {
  const std::uint64_t bits = mix64(seed ^ 0x632BE59BD9B4E019ULL);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1), 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellgames
