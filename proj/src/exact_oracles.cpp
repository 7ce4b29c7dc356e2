#include "ealab/exact_oracles.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ealab/drift_bounds.hpp"
#include "ealab/exact_sum.hpp"
#include "ealab/rng.hpp"

namespace ealab {

namespace {

constexpr double kResidualLimit = 1e-9;

// Binomial PMF over k = 0..m assembled from log-domain coefficients; stable
// up to the n = 2000 chain limit.
std::vector<double> binomial_pmf(std::size_t m, double p) {
  std::vector<double> pmf(m + 1);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lg = std::lgamma(static_cast<double>(m) + 1.0);
  for (std::size_t k = 0; k <= m; ++k) {
    const double dk = static_cast<double>(k);
    const double dm = static_cast<double>(m);
    pmf[k] = std::exp(lg - std::lgamma(dk + 1.0) - std::lgamma(dm - dk + 1.0) +
                      dk * lp + (dm - dk) * lq);
  }
  return pmf;
}

}  // namespace

double OnesDistribution::cdf(std::size_t j) const {
  if (j >= probs.size()) return 1.0;
  return std::accumulate(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(j) + 1,
                         0.0);
}

double OnesDistribution::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) m += static_cast<double>(j) * probs[j];
  return m;
}

OnesDistribution exact_mutation_ones_distribution(std::size_t i, std::size_t n, double p) {
  if (n == 0) throw std::invalid_argument("ones distribution: n must be >= 1");
  if (i > n) throw std::invalid_argument("ones distribution: need i <= n");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("ones distribution: p must be in (0, 1)");

  const auto pa = binomial_pmf(i, p);      // flipped one-bits
  const auto pb = binomial_pmf(n - i, p);  // flipped zero-bits

  OnesDistribution dist;
  dist.n = n;
  dist.i = i;
  dist.p = p;
  dist.probs.assign(n + 1, 0.0);
  for (std::size_t a = 0; a < pa.size(); ++a)
    for (std::size_t b = 0; b < pb.size(); ++b) dist.probs[i - a + b] += pa[a] * pb[b];

  const double sum = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
  dist.renorm_residual = std::abs(1.0 - sum);
  if (dist.renorm_residual >= kResidualLimit)
    throw std::runtime_error("ones distribution: renormalization residual too large");
  for (auto& q : dist.probs) q /= sum;
  return dist;
}

CdfMonotonicityReport check_mutation_cdf_monotonicity(std::size_t n, double p, double tol) {
  CdfMonotonicityReport report;
  report.n = n;
  report.p = p;
  report.pass = true;

  std::vector<std::vector<double>> cdfs(n + 1);
  std::vector<std::vector<double>> pmfs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    auto dist = exact_mutation_ones_distribution(i, n, p);
    pmfs[i] = dist.probs;
    cdfs[i].resize(n + 1);
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      acc += dist.probs[j];
      cdfs[i][j] = acc;
    }
  }

  constexpr std::size_t kMaxWitnesses = 64;
  for (std::size_t ia = 0; ia <= n && report.pass; ++ia) {
    for (std::size_t ib = ia + 1; ib <= n && report.pass; ++ib) {
      for (std::size_t j = 0; j <= n; ++j) {
        if (cdfs[ia][j] < cdfs[ib][j] - tol) {
          report.pass = false;
          report.violation = CdfWitness{ia, ib, j, cdfs[ia][j], cdfs[ib][j]};
          break;
        }
      }
    }
  }

  // Informational: the stronger pointwise PMF comparison on j <= i_a.
  for (std::size_t ia = 0; ia <= n; ++ia) {
    for (std::size_t ib = ia + 1; ib <= n; ++ib) {
      for (std::size_t j = 0; j <= ia; ++j) {
        if (pmfs[ia][j] < pmfs[ib][j] - tol) {
          ++report.pmf_violation_count;
          if (report.pmf_violations.size() < kMaxWitnesses)
            report.pmf_violations.push_back(
                CdfWitness{ia, ib, j, pmfs[ia][j], pmfs[ib][j]});
        }
      }
    }
  }
  return report;
}

double OneMaxChain::one_step_drift(std::size_t i) const {
  const auto& row = rows.at(i);
  double drift = 0.0;
  for (std::size_t j = 0; j < i; ++j)
    drift += row[j] * static_cast<double>(i - j);
  return drift;
}

OneMaxChain solve_onemax_chain(std::size_t n, double p, std::size_t limit) {
  if (n == 0) throw std::invalid_argument("solve_onemax_chain: n must be >= 1");
  if (n > limit)
    throw std::invalid_argument("solve_onemax_chain: n exceeds the configured limit");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("solve_onemax_chain: p must be in (0, 1)");

  OneMaxChain chain;
  chain.n = n;
  chain.p = p;
  chain.rows.resize(n + 1);
  chain.expected_steps.assign(n + 1, 0.0);
  chain.rows[0] = {1.0};

  for (std::size_t i = 1; i <= n; ++i) {
    const auto dist = exact_mutation_ones_distribution(i, n, p);
    auto& row = chain.rows[i];
    row.assign(i + 1, 0.0);
    double below = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      row[j] = dist.probs[j];
      below += dist.probs[j];
    }
    row[i] = 1.0 - below;  // rejected moves plus accepted moves staying at i

    if (below <= 0.0)
      throw std::runtime_error("solve_onemax_chain: absorbing non-target state " +
                               std::to_string(i));
    double acc = 1.0;
    for (std::size_t j = 1; j < i; ++j) acc += row[j] * chain.expected_steps[j];
    chain.expected_steps[i] = acc / below;
  }

  // Uniform-start mean: weights binom(n, i) / 2^n via log-domain coefficients.
  const double lg = std::lgamma(static_cast<double>(n) + 1.0);
  const double ln2n = static_cast<double>(n) * std::log(2.0);
  double mean = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    const double dn = static_cast<double>(n);
    const double w =
        std::exp(lg - std::lgamma(di + 1.0) - std::lgamma(dn - di + 1.0) - ln2n);
    mean += w * chain.expected_steps[i];
  }
  chain.uniform_start_steps = mean;
  chain.uniform_start_evals = mean + 1.0;
  return chain;
}

double exact_one_step_drift(const LinearFunction& f, const Potential& pot,
                            const BitString& a, double p) {
  const std::size_t n = f.n();
  if (n > 16)
    throw std::invalid_argument(
        "exact_one_step_drift: n > 16; use the Monte Carlo drift estimator instead");
  if (pot.n() != n || a.n() != n)
    throw std::invalid_argument("exact_one_step_drift: dimension mismatch");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("exact_one_step_drift: p must be in (0, 1)");

  std::vector<double> pow_p(n + 1), pow_q(n + 1);
  pow_p[0] = pow_q[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    pow_p[k] = pow_p[k - 1] * p;
    pow_q[k] = pow_q[k - 1] * (1.0 - p);
  }

  std::uint32_t abits = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (a.get(k)) abits |= 1u << k;

  // For each mask, the f difference and potential difference of the mutated
  // point are assembled directly from the flipped positions.  Acceptance is
  // the exact sign of the f difference: the flip terms alone avoid the
  // absorption a running f value would suffer, and the expansion fallback
  // settles genuine near-ties.
  std::array<double, 16> terms{};
  double total = 0.0;  // mask 0 contributes zero drift
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    double df = 0.0;
    double dg = 0.0;
    double abs_sum = 0.0;
    std::size_t cnt = 0;
    for (auto rest = static_cast<std::uint32_t>(mask); rest != 0; rest &= rest - 1) {
      const auto b = static_cast<unsigned>(std::countr_zero(rest));
      const double sign = (abits >> b) & 1u ? -1.0 : 1.0;
      const double term = sign * f.weight(b);
      terms[cnt++] = term;
      df += term;
      abs_sum += f.weight(b);
      dg += sign * pot.g[b];
    }
    if (sum_sign_filtered(std::span<const double>(terms.data(), cnt), df, abs_sum) <= 0)
      total += pow_p[cnt] * pow_q[n - cnt] * (-dg);  // g(a) - g(a') = -dg
  }
  return total;
}

DriftConditionReport verify_drift_condition(const LinearFunction& f, PotentialKind kind,
                                            double p, double alpha,
                                            std::size_t sample_count, std::uint64_t seed,
                                            double slack) {
  const std::size_t n = f.n();
  if (n > 16) throw std::invalid_argument("verify_drift_condition: n must be <= 16");

  Potential pot;
  double delta;  // drift coefficient: bound = delta * s
  switch (kind) {
    case PotentialKind::refined: {
      if (n < 4) throw std::invalid_argument("verify_drift_condition: refined needs n >= 4");
      if (std::abs(p * static_cast<double>(n) - 1.0) > 1e-9)
        throw std::invalid_argument("verify_drift_condition: refined needs p = 1/n");
      pot = build_refined_potential(f);
      delta = 1.0 / (std::exp(1.0) * static_cast<double>(n));
      break;
    }
    case PotentialKind::adaptive:
      pot = build_adaptive_potential(f, p, alpha);
      delta = p * std::exp((static_cast<double>(n) - 1.0) * std::log1p(-p)) *
              (1.0 - 1.0 / alpha);
      break;
    case PotentialKind::identity:
      pot = identity_potential(n);
      if (!(alpha > 1.0))
        throw std::invalid_argument("verify_drift_condition: alpha must be > 1");
      delta = p * std::exp((static_cast<double>(n) - 1.0) * std::log1p(-p)) *
              (1.0 - 1.0 / alpha);
      break;
    default:
      throw std::logic_error("verify_drift_condition: bad kind");
  }

  std::vector<BitString> points;
  points.push_back(BitString::ones(n));
  for (std::size_t k = 0; k < n; ++k) {
    BitString x(n);
    x.set(k, true);
    points.push_back(x);
  }
  SplitMix64 rng(detail::mix64(seed ^ 0x64726966ULL));
  for (std::size_t s = 0; s < sample_count; ++s) {
    BitString x = BitString::random(n, rng);
    while (x.is_zero()) x = BitString::random(n, rng);
    points.push_back(x);
  }

  DriftConditionReport report;
  report.pass = true;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    const double s = potential_value(pot, x);
    const double drift = exact_one_step_drift(f, pot, x, p);
    const double bound = delta * s;
    const double margin = drift - bound;
    report.min_margin = std::min(report.min_margin, margin);
    ++report.points_checked;
    if (margin < -slack) {
      report.pass = false;
      report.violating_point = x;
      report.violating_drift = drift;
      report.violating_bound = bound;
      return report;
    }
  }
  return report;
}

DriftDominanceScan scan_onemax_drift_dominance(std::size_t n_max,
                                               std::span<const double> p_grid,
                                               double slack) {
  DriftDominanceScan scan;
  scan.pass = true;
  scan.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (double p : p_grid) {
      for (std::size_t i = 0; i <= n; ++i) {
        double drift = 0.0;
        if (i > 0) {
          const auto dist = exact_mutation_ones_distribution(i, n, p);
          for (std::size_t j = 0; j < i; ++j)
            drift += dist.probs[j] * static_cast<double>(i - j);
        }
        const double bound = onemax_drift_bound(i, n, p);
        const double margin = bound - drift;
        scan.min_margin = std::min(scan.min_margin, margin);
        ++scan.checked;
        if (margin < -slack) {
          scan.pass = false;
          scan.violation = CdfWitness{i, n, 0, drift, bound};
          scan.violation_p = p;
          return scan;
        }
      }
    }
  }
  return scan;
}

}  // namespace ealab
