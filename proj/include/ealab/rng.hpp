#pragma once

#include <cstdint>

namespace ealab {

// SplitMix64 generator (Vigna's public-domain mixer).  Hand-rolled instead of
// <random> engines/distributions so that output is bit-identical across
// compilers and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; never returns 0.
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  // Unbiased uniform integer in [0, bound) via masked rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    std::uint64_t mask = ~0ULL;
    if (bound > 1) {
      unsigned bits = 64 - static_cast<unsigned>(__builtin_clzll(bound - 1));
      mask = (bits >= 64) ? ~0ULL : ((1ULL << bits) - 1);
    } else {
      return 0;
    }
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Combines key material into a stream seed; order-sensitive.
inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t v) {
  return detail::mix64(h + 0x9E3779B97F4A7C15ULL + (v ^ (h << 6) ^ (h >> 2)));
}

// Counter-based stream: the randomness consumed at a given (master seed,
// replication, step) never depends on how much earlier steps consumed, so
// replications are reproducible regardless of scheduling.
inline SplitMix64 stream_for(std::uint64_t master_seed, std::uint64_t replication,
                             std::uint64_t step) {
  return SplitMix64(mix_key(mix_key(detail::mix64(master_seed), replication), step));
}

// Stream key identifying one replication; recorded in run records.
inline std::uint64_t replication_key(std::uint64_t master_seed, std::uint64_t replication) {
  return mix_key(detail::mix64(master_seed), replication);
}

}  // namespace ealab
