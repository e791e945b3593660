#pragma once

#include <cmath>
#include <cstdint>

namespace epinet {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 step (Steele, Lea, Flood). Used for seeding and for the
// stream-derivation rule below.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna). The state is filled from SplitMix64 so
// that any 64-bit seed, including 0, yields a valid nonzero state.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exponential with mean 1 via inverse CDF; finite for every draw.
  double exponential() { return -std::log1p(-uniform()); }

  // Uniform integer in [0, bound). Fixed-point multiply; the O(bound/2^64)
  // bias is far below anything our statistics can resolve.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Stream-derivation rule: run r of master seed m is seeded with
// m + (r+1)*kGoldenGamma, then expanded through SplitMix64 inside
// Xoshiro256. Distinct runs get decorrelated, reproducible streams.
inline Xoshiro256 derive_stream(std::uint64_t master_seed, std::uint64_t run_index) {
  return Xoshiro256(master_seed + (run_index + 1) * kGoldenGamma);
}

}  // namespace epinet
