#pragma once

#include <cstddef>
#include <vector>

#include "ealab/bitstring.hpp"
#include "ealab/rng.hpp"

namespace ealab {

// Standard-bit-mutation parameters with per-(n,p) constants cached for the
// sampling loops.  Immutable after construction; safe to share across threads.
class MutationParams {
 public:
  MutationParams(std::size_t n, double p);

  std::size_t n() const { return n_; }
  double p() const { return p_; }

  // Samples the set of flipped positions (0-based, unordered) into `out`.
  // For small p this draws Binomial(n, p) flips and places them with Floyd's
  // algorithm; otherwise it sweeps per bit.  Both are exact samples of the
  // independent per-bit flip distribution.
  void sample_flips(SplitMix64& rng, std::vector<std::uint32_t>& out) const;

  // Reference sampler: one Bernoulli(p) draw per bit, always.
  void sample_flips_per_bit(SplitMix64& rng, std::vector<std::uint32_t>& out) const;

  std::size_t sample_flip_count(SplitMix64& rng) const;  // Binomial(n, p) by inversion

 private:
  std::size_t n_;
  double p_;
  double q0_;         // (1-p)^n
  double odds_;       // p/(1-p)
  bool use_per_bit_;  // large p: per-bit sweep is cheaper and never underflows
};

// Flips each bit of x independently with probability params.p().
BitString mutate(const BitString& x, const MutationParams& params, SplitMix64& rng);

// Independent reference implementation used for cross-testing.
BitString mutate_per_bit(const BitString& x, const MutationParams& params, SplitMix64& rng);

}  // namespace ealab
