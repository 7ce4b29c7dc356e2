#include "ealab/mutation.hpp"

#include <cmath>
#include <stdexcept>

namespace ealab {

namespace {
constexpr double kPerBitThreshold = 0.1;
}

MutationParams::MutationParams(std::size_t n, double p) : n_(n), p_(p) {
  if (n == 0) throw std::invalid_argument("MutationParams: n must be >= 1");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("MutationParams: p must be in (0, 1)");
  q0_ = std::exp(static_cast<double>(n) * std::log1p(-p));
  odds_ = p / (1.0 - p);
  use_per_bit_ = (p > kPerBitThreshold) || (q0_ == 0.0);
}

std::size_t MutationParams::sample_flip_count(SplitMix64& rng) const {
  // CDF inversion walking up from k = 0; O(np) expected.
  double u = rng.next_unit();
  double pmf = q0_;
  double cdf = pmf;
  std::size_t k = 0;
  while (u >= cdf && k < n_) {
    ++k;
    pmf *= odds_ * static_cast<double>(n_ - k + 1) / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

void MutationParams::sample_flips(SplitMix64& rng, std::vector<std::uint32_t>& out) const {
  out.clear();
  if (use_per_bit_) {
    for (std::uint32_t i = 0; i < n_; ++i)
      if (rng.next_unit() < p_) out.push_back(i);
    return;
  }
  std::size_t k = sample_flip_count(rng);
  if (k == 0) return;
  // Floyd's algorithm: k distinct positions, uniform over k-subsets.
  thread_local std::vector<std::uint64_t> seen;
  if (seen.size() < (n_ + 63) / 64) seen.assign((n_ + 63) / 64, 0);
  for (std::size_t j = n_ - k; j < n_; ++j) {
    auto r = static_cast<std::uint32_t>(rng.next_below(j + 1));
    std::uint32_t pick = (seen[r >> 6] >> (r & 63)) & 1 ? static_cast<std::uint32_t>(j) : r;
    seen[pick >> 6] |= 1ULL << (pick & 63);
    out.push_back(pick);
  }
  for (auto pos : out) seen[pos >> 6] &= ~(1ULL << (pos & 63));
}

void MutationParams::sample_flips_per_bit(SplitMix64& rng,
                                          std::vector<std::uint32_t>& out) const {
  out.clear();
  for (std::uint32_t i = 0; i < n_; ++i)
    if (rng.next_unit() < p_) out.push_back(i);
}

namespace {
BitString apply_flips(const BitString& x, const std::vector<std::uint32_t>& flips) {
  BitString y = x;
  for (auto pos : flips) y.flip(pos);
  return y;
}
}  // namespace

BitString mutate(const BitString& x, const MutationParams& params, SplitMix64& rng) {
  if (x.n() != params.n()) throw std::invalid_argument("mutate: dimension mismatch");
  std::vector<std::uint32_t> flips;
  params.sample_flips(rng, flips);
  return apply_flips(x, flips);
}

BitString mutate_per_bit(const BitString& x, const MutationParams& params, SplitMix64& rng) {
  if (x.n() != params.n()) throw std::invalid_argument("mutate: dimension mismatch");
  std::vector<std::uint32_t> flips;
  params.sample_flips_per_bit(rng, flips);
  return apply_flips(x, flips);
}

}  // namespace ealab
