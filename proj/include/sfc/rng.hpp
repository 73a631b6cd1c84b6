#pragma once
#include <cstdint>
#include <cmath>

namespace sfc {

// splitmix64 step; used for seeding and stream derivation
inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for a named substream (replication, sensor, block, ...).
// Fixed algorithm: results must not depend on the platform's std library.
// Changing this invalidates every frozen value in the test suite.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t x = base ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  splitmix64(x);
  return splitmix64(x);
}

inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

// xoshiro256**
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  uint64_t next_u64() {
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0,bound), bound >= 1; rejection keeps it exactly uniform
  uint32_t next_below(uint32_t bound) {
    uint32_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    for (;;) {
      uint32_t v = static_cast<uint32_t>(next_u64() >> 32) & mask;
      if (v < bound) return v;
    }
  }

  // exponential with the given mean; next_unit() < 1 so the log argument stays positive
  double next_exponential(double mean) { return -mean * std::log1p(-next_unit()); }

 private:
  static uint64_t rotl(uint64_t v, int s) { return (v << s) | (v >> (64 - s)); }
  uint64_t s_[4];
};

}  // namespace sfc
