#pragma once

#include <cstdint>

namespace bbtpolar {

// Fixed 64-bit generator (SplitMix64 state update) used everywhere a seed
// appears: interleaver generation, noise sampling, random message bits.
// Seeded runs are bit-identical across platforms and worker counts.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased-enough fixed-point scaling; deterministic, no rejection loop.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // 53-bit uniform in [0,1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; caches the second value of each pair.
  double gaussian();

  bool bit() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Order-sensitive key mixing for deriving independent streams from
// (seed, component ids). Distinct argument tuples give distinct streams.
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace bbtpolar
