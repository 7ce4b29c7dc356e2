#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ealab {

// Closed-form runtime bound calculators.  All pure functions; (1-p)^{+-n}
// style terms go through exp(n*log1p(-p)) for stability at small p.

struct MultDriftUpper {
  double expectation_bound;  // (ln(s0) + 1) / delta
  double tail_threshold;     // (ln(s0) + t) / delta
  double tail_prob;          // e^{-t}
};

// Multiplicative drift, upper bound: a process with drift E(X_t - X_{t+1} |
// X_t = s) >= delta*s and minimum state 1 hits 0 within the returned bounds.
MultDriftUpper mult_drift_upper(double delta, double s0, double t);

// Multiplicative drift, lower bound: ((ln s0 - ln smin)/delta) * (1-beta)/(1+beta).
double mult_drift_lower(double delta, double beta, double s0, double smin);

// Additive drift, lower bound: E(T) >= g/u for total required progress g and
// per-step expected progress at most u.
double additive_drift_lower(double g, double u);

// General upper bound b(t) for the elitist EA on any linear function with
// mutation probability p, via the adaptive potential with parameter alpha:
//   b(t) = (1-p)^{1-n} * [ n*alpha^2*(1-p)^{1-n}/(alpha-1)
//                          + (alpha/(alpha-1)) * (ln(1/p) + (n-1)ln(1-p) + t)/p ]
// Optimization time exceeds b(t) with probability at most e^{-t}; b(1) bounds
// the expectation.
double general_upper_bound(std::size_t n, double p, double alpha, double t);

// Leading term (e^c/c) * n * ln n of the runtime for p = c/n; the same term
// is an upper bound factor (1+o(1)) and a lower bound factor (1-o(1)), with
// the o(1) dropped here.
double constant_mut_upper(std::size_t n, double c);
double constant_mut_lower(std::size_t n, double c);

struct RefinedUpper {
  double expectation_bound;  // e*n*ln n + 2*e*n  (the +O(1) is omitted)
  double tail_threshold;     // e*n*(ln n + t + 1)
  double tail_prob;          // e^{-t}
};

// Refined upper bound for p = 1/n; requires n >= 4.
RefinedUpper refined_upper_bound(std::size_t n, double t = 1.0);

// Lower bound (1-p)^{-n} * (1/p) * min{ln n, ln(1/(p^3 n^2))} for small
// mutation probabilities; the (1-o(1)) factor is dropped.  Errors outside the
// regime ln(1/(p^3 n^2)) > 0.
double small_p_lower_bound(std::size_t n, double p);

// Upper bound i*p*(1-p + i*p^2/(1-p))^{n-i} on the expected one-step decrease
// of the ones-count of the elitist EA on OneMax from a point with i ones.
double onemax_drift_bound(std::size_t i, std::size_t n, double p);

enum class BoundKind { expectation_upper, expectation_lower, tail };

struct BoundReport {
  std::string id;  // which bound this instantiates, e.g. "general-upper"
  std::vector<std::pair<std::string, double>> inputs;
  double value = 0.0;
  BoundKind kind = BoundKind::expectation_upper;
  bool asymptotic_terms_dropped = false;
  std::string note;
};

// Full table for given (n, p, alpha, t): general bound, refined bound and its
// tail, small-p lower bound, constant-mutation leading terms for c = p*n, and
// the initial-potential-value bounds.
std::vector<BoundReport> bound_report_table(std::size_t n, double p, double alpha,
                                            double t);

std::string bound_table_to_text(const std::vector<BoundReport>& table);
std::string bound_table_to_json(const std::vector<BoundReport>& table);

}  // namespace ealab
