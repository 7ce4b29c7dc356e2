#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace ealab {

// Exact sign of sum(terms) for up to 32 doubles, via a nonoverlapping
// expansion (error-free TwoSum cascade).  Weight spreads here can exceed the
// 53-bit mantissa by hundreds of binary orders, so no fixed-precision sum can
// decide near-tie acceptance comparisons; the expansion can.
inline int exact_sum_sign(std::span<const double> terms) {
  std::array<double, 33> e{};
  std::size_t m = 0;
  for (double b : terms) {
    std::array<double, 33> h{};
    std::size_t out = 0;
    double q = b;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = q + e[i];
      const double bv = x - q;
      const double av = x - bv;
      const double err = (q - av) + (e[i] - bv);
      if (err != 0.0) h[out++] = err;
      q = x;
    }
    if (q != 0.0) h[out++] = q;
    e = h;
    m = out;
  }
  if (m == 0) return 0;
  return e[m - 1] > 0.0 ? 1 : -1;  // the last component dominates
}

// Sign of sum(terms), deciding through the plain double value when it clears
// the worst-case summation error bound and falling back to the exact
// expansion otherwise.  double_sum and abs_sum must be the sequential sum of
// terms and of their absolute values.
inline int sum_sign_filtered(std::span<const double> terms, double double_sum,
                             double abs_sum) {
  const double threshold = static_cast<double>(terms.size()) * 0x1p-52 * abs_sum;
  if (double_sum > threshold) return 1;
  if (double_sum < -threshold) return -1;
  return exact_sum_sign(terms);
}

}  // namespace ealab
