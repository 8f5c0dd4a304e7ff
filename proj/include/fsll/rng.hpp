#pragma once

#include <cstdint>

namespace fsll {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: value k of stream s under seed is a pure function of
/// (seed, s, k), so any block of draws can be produced independently.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t start = 0)
      : key_(mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL))), counter_(start) {}

  std::uint64_t next() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = -bound % bound;
    for (;;) {
      const std::uint64_t v = next();
      const unsigned __int128 m = static_cast<unsigned __int128>(v) * bound;
      if (static_cast<std::uint64_t>(m) >= limit) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Derives an independent seed for a named sub-task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return mix64(seed * 0x2545f4914f6cdd1dULL + tag); }

}  // namespace fsll
