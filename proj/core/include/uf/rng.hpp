#pragma once

#include <array>
#include <cstdint>

namespace uf {

/// SplitMix64 step. Used for seed expansion and per-trial seed derivation.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** generator. The standard <random> engines are portable but the
/// distributions are not; trials must replay bit-exactly across platforms, so
/// the fuzzer draws from this fixed algorithm instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, bound). bound must be nonzero. Modulo bias is irrelevant
  /// at fuzzing bound sizes and keeps the draw count per call fixed.
  uint64_t below(uint64_t bound) { return next() % bound; }

  uint8_t byte() { return static_cast<uint8_t>(next() & 0xff); }

  bool one_in(uint64_t n) { return below(n) == 0; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> state_{};
};

}  // namespace uf
