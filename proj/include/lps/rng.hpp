// Deterministic splitmix64 generator with independent streams, so estimates
// reproduce bit-for-bit for a given seed regardless of scheduling.
#pragma once

#include "lps/types.hpp"

#include <cstdint>

namespace lps {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    mix.next_u64();
    return mix;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }
  Scalar uniform(Scalar a, Scalar b) { return a + (b - a) * uniform(); }
  Index uniform_index(Index n) { return static_cast<Index>(next_u64() % static_cast<std::uint64_t>(n)); }
  int sign() { return next_u64() & 1 ? 1 : -1; }

  Scalar normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    Scalar u1 = uniform(), u2 = uniform();
    while (u1 <= 0) u1 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2 * kPi * u2);
    have_cached_ = true;
    return r * std::cos(2 * kPi * u2);
  }

  Complex cnormal() { return Complex(normal(), normal()); }

 private:
  std::uint64_t state_;
  Scalar cached_ = 0;
  bool have_cached_ = false;
};

}  // namespace lps
