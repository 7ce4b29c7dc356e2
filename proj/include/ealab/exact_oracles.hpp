#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ealab/bitstring.hpp"
#include "ealab/linear_function.hpp"
#include "ealab/potentials.hpp"

namespace ealab {

// Exact distribution of the ones-count after standard bit mutation of a point
// with i ones: (i - A) + B with A ~ Bin(i, p), B ~ Bin(n-i, p) independent,
// computed by exact convolution in the probability domain (binomial terms
// assembled from log-domain coefficients).
struct OnesDistribution {
  std::size_t n = 0;
  std::size_t i = 0;
  double p = 0.0;
  std::vector<double> probs;      // P(ones(mut) = j), j = 0..n, renormalized
  double renorm_residual = 0.0;   // |1 - raw sum|, must stay below 1e-9

  double cdf(std::size_t j) const;
  double mean() const;
};

OnesDistribution exact_mutation_ones_distribution(std::size_t i, std::size_t n, double p);

struct CdfWitness {
  std::size_t i_a = 0, i_b = 0, j = 0;
  double value_a = 0.0, value_b = 0.0;
};

// Checks, for all 0 <= i_a < i_b <= n and all j, that the mutation ones-count
// CDF from i_a ones dominates the one from i_b ones:
// P(ones(mut(a)) <= j) >= P(ones(mut(b)) <= j).  Holds for p <= 1/2.  For any
// p the report also lists pointwise PMF comparisons (j <= i_a) that fail;
// those are informational, the pointwise form is known to break for large p.
struct CdfMonotonicityReport {
  std::size_t n = 0;
  double p = 0.0;
  bool pass = false;
  std::optional<CdfWitness> violation;       // first CDF violation found
  std::vector<CdfWitness> pmf_violations;    // informational, capped
  std::size_t pmf_violation_count = 0;
};

CdfMonotonicityReport check_mutation_cdf_monotonicity(std::size_t n, double p,
                                                      double tol = 1e-12);

// Ones-count Markov chain of the elitist EA on OneMax.  Post-selection rows:
// P(i -> j) = P(ones(mut) = j) for j < i, with the remaining mass on the
// self-loop.  Expected hitting times of state 0 by forward substitution.
struct OneMaxChain {
  std::size_t n = 0;
  double p = 0.0;
  std::vector<std::vector<double>> rows;  // rows[i] has i+1 entries, j = 0..i
  std::vector<double> expected_steps;     // E_i, mutation steps from i ones to 0
  double uniform_start_steps = 0.0;       // sum_i binom(n,i) 2^-n E_i
  double uniform_start_evals = 0.0;       // + 1 for the initial evaluation

  // E[i - I'] read off row i: the exact one-step ones-count drift.
  double one_step_drift(std::size_t i) const;
};

OneMaxChain solve_onemax_chain(std::size_t n, double p, std::size_t limit = 2000);

// Exact one-step potential drift of the elitist EA at point a: sum over all
// 2^n mutation masks of P(mask) * (g(a) - g(a')) where a' is the mutated
// point if f(a') <= f(a) and a otherwise.  The acceptance comparison is
// decided exactly (expansion arithmetic on the flipped-weight terms), so
// weight spreads beyond the double mantissa cannot corrupt it.  Requires
// n <= 16.
double exact_one_step_drift(const LinearFunction& f, const Potential& pot,
                            const BitString& a, double p);

struct DriftConditionReport {
  bool pass = false;
  std::size_t points_checked = 0;
  double min_margin = 0.0;  // min over points of drift - bound
  std::optional<BitString> violating_point;
  double violating_drift = 0.0;
  double violating_bound = 0.0;
};

// Verifies the one-step drift condition by exact enumeration at sample_count
// random non-optimal points plus, always, the all-ones point and every
// single-one point.  The bound is s/(e*n) for the refined kind (which
// requires p = 1/n and n >= 4) and s * p * (1-p)^{n-1} * (1 - 1/alpha)
// otherwise, where s is the potential value of the point.  The slack covers
// floating point only.
DriftConditionReport verify_drift_condition(const LinearFunction& f, PotentialKind kind,
                                            double p, double alpha,
                                            std::size_t sample_count, std::uint64_t seed,
                                            double slack = 1e-12);

// Exhaustive comparison of the exact OneMax one-step drift against the
// closed-form bound i*p*(1-p+i*p^2/(1-p))^{n-i} over all i <= n <= n_max and
// the given p grid.
struct DriftDominanceScan {
  bool pass = false;
  std::size_t checked = 0;
  double min_margin = 0.0;  // min of bound - drift
  std::optional<CdfWitness> violation;  // i_a = i, i_b = n; value_a = drift, value_b = bound
  double violation_p = 0.0;
};

DriftDominanceScan scan_onemax_drift_dominance(std::size_t n_max,
                                               std::span<const double> p_grid,
                                               double slack = 1e-12);

}  // namespace ealab
