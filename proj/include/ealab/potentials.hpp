#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ealab/bitstring.hpp"
#include "ealab/linear_function.hpp"

namespace ealab {

enum class PotentialKind { identity, adaptive, refined };

std::string potential_kind_name(PotentialKind kind);
PotentialKind potential_kind_from_name(const std::string& name);

// Weight vector g_1..g_n used as drift function: the process tracked is
// X = g(x) = sum_i g_i x_i, zero exactly at the optimum.
struct Potential {
  PotentialKind kind = PotentialKind::identity;
  std::vector<double> g;
  // construction parameters (adaptive: alpha and p; refined: p = 1/n implied)
  double alpha = 0.0;
  double p = 0.0;

  std::size_t n() const { return g.size(); }
};

Potential identity_potential(std::size_t n);

// Adaptive construction: g_1 = 1 and g_i = min{gamma_i, g_{i-1} * w_i/w_{i-1}}
// with gamma_i = (1 + alpha*p*(1-p)^{1-n})^{i-1}.  Extreme weight ratios are
// capped by gamma, otherwise consecutive potentials keep the weight ratio.
// Requires 0 < p < 1 and alpha > 1.
Potential build_adaptive_potential(const LinearFunction& f, double p, double alpha);

// Refined construction for p = 1/n: g_i = (1 + 1/(n-1))^{m(i)-1} where m(i)
// is the first index of the run of weights equal to w_i.  Tied weights get
// tied potentials.  Requires n >= 2.
Potential build_refined_potential(const LinearFunction& f);

double potential_value(const Potential& pot, const BitString& x);

// Upper bound on ln(X at time 0):
//   adaptive: n*alpha*p*(1-p)^{1-n} + ln(1/p) + (n-1)*ln(1-p)
//   refined:  ln(n) + 1
// (identity: ln(n), the trivial all-ones cap)
double initial_value_bound(PotentialKind kind, std::size_t n, double p = 0.0,
                           double alpha = 0.0);

// Default alpha = max(ln ln n, 1 + 1e-6); alpha stays caller-overridable.
double default_alpha(std::size_t n);

// gamma_i of the adaptive construction, for inspection/export.
double adaptive_gamma(std::size_t i, std::size_t n, double p, double alpha);

// CSV columns: i, w_i, gamma_i, g_i (gamma blank for non-adaptive kinds).
void write_potential_csv(std::ostream& os, const LinearFunction& f, const Potential& pot);

}  // namespace ealab
