#include "ealab/potentials.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ealab {

namespace {
// Above this, min{} comparisons move to log space.
constexpr double kLinearLimit = 1e300;
}  // namespace

std::string potential_kind_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::identity: return "identity";
    case PotentialKind::adaptive: return "adaptive";
    case PotentialKind::refined: return "refined";
  }
  throw std::logic_error("potential_kind_name: bad kind");
}

PotentialKind potential_kind_from_name(const std::string& name) {
  if (name == "identity") return PotentialKind::identity;
  if (name == "adaptive") return PotentialKind::adaptive;
  if (name == "refined") return PotentialKind::refined;
  throw std::invalid_argument("unknown potential kind: " + name);
}

Potential identity_potential(std::size_t n) {
  if (n == 0) throw std::invalid_argument("identity_potential: n must be >= 1");
  Potential pot;
  pot.kind = PotentialKind::identity;
  pot.g.assign(n, 1.0);
  return pot;
}

Potential build_adaptive_potential(const LinearFunction& f, double p, double alpha) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("build_adaptive_potential: p must be in (0, 1)");
  if (!(alpha > 1.0))
    throw std::invalid_argument("build_adaptive_potential: alpha must be > 1");

  const std::size_t n = f.n();
  const auto& w = f.weights();

  // x = alpha * p * (1-p)^{1-n}; can overflow for large n*p, so keep its log.
  const double log_x =
      std::log(alpha) + std::log(p) + (1.0 - static_cast<double>(n)) * std::log1p(-p);
  const double x = std::exp(log_x);
  const double log_1px = (log_x > 36.0) ? log_x : std::log1p(std::exp(log_x));

  Potential pot;
  pot.kind = PotentialKind::adaptive;
  pot.alpha = alpha;
  pot.p = p;
  pot.g.assign(n, 1.0);

  double gamma = 1.0;       // gamma_i, linear; may saturate to inf
  double log_g_prev = 0.0;  // ln g_{i-1}, always finite
  for (std::size_t i = 1; i < n; ++i) {
    gamma *= 1.0 + x;
    const double log_gamma = static_cast<double>(i) * log_1px;
    const double ratio = w[i] / w[i - 1];
    const double cand = pot.g[i - 1] * ratio;
    double log_g;
    if (gamma < kLinearLimit && cand < kLinearLimit) {
      pot.g[i] = std::min(gamma, cand);
      log_g = std::log(pot.g[i]);
    } else {
      const double log_cand = log_g_prev + std::log(ratio);
      log_g = std::min(log_gamma, log_cand);
      pot.g[i] = std::exp(log_g);
    }
    log_g_prev = log_g;
  }
  return pot;
}

Potential build_refined_potential(const LinearFunction& f) {
  const std::size_t n = f.n();
  if (n < 2) throw std::invalid_argument("build_refined_potential: n must be >= 2");
  const auto& w = f.weights();
  const double base = 1.0 + 1.0 / (static_cast<double>(n) - 1.0);

  std::vector<double> pw(n);
  pw[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) pw[k] = pw[k - 1] * base;

  Potential pot;
  pot.kind = PotentialKind::refined;
  pot.p = 1.0 / static_cast<double>(n);
  pot.g.assign(n, 1.0);
  std::size_t group_start = 0;  // first index of the current run of equal weights
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && w[i] != w[i - 1]) group_start = i;
    pot.g[i] = pw[group_start];
  }
  return pot;
}

double potential_value(const Potential& pot, const BitString& x) {
  if (x.n() != pot.n()) throw std::invalid_argument("potential_value: dimension mismatch");
  double sum = 0.0;
  const auto& bits = x.bits();
  for (std::size_t k = 0; k < pot.g.size(); ++k)
    if (bits[k]) sum += pot.g[k];
  return sum;
}

double initial_value_bound(PotentialKind kind, std::size_t n, double p, double alpha) {
  if (n == 0) throw std::invalid_argument("initial_value_bound: n must be >= 1");
  switch (kind) {
    case PotentialKind::identity:
      return std::log(static_cast<double>(n));
    case PotentialKind::refined:
      if (n < 2) throw std::invalid_argument("initial_value_bound: refined needs n >= 2");
      return std::log(static_cast<double>(n)) + 1.0;
    case PotentialKind::adaptive: {
      if (!(p > 0.0) || !(p < 1.0) || !(alpha > 1.0))
        throw std::invalid_argument("initial_value_bound: need 0 < p < 1 and alpha > 1");
      const double dn = static_cast<double>(n);
      const double pow_term = std::exp((1.0 - dn) * std::log1p(-p));  // (1-p)^{1-n}
      return dn * alpha * p * pow_term + std::log(1.0 / p) +
             (dn - 1.0) * std::log1p(-p);
    }
  }
  throw std::logic_error("initial_value_bound: bad kind");
}

double default_alpha(std::size_t n) {
  double a = (n >= 3) ? std::log(std::log(static_cast<double>(n)))
                      : -std::numeric_limits<double>::infinity();
  return std::max(a, 1.0 + 1e-6);
}

double adaptive_gamma(std::size_t i, std::size_t n, double p, double alpha) {
  if (i < 1 || i > n) throw std::invalid_argument("adaptive_gamma: i out of range");
  const double log_x =
      std::log(alpha) + std::log(p) + (1.0 - static_cast<double>(n)) * std::log1p(-p);
  const double x = std::exp(log_x);
  double gamma = 1.0;
  for (std::size_t k = 1; k < i; ++k) gamma *= 1.0 + x;
  return gamma;
}

void write_potential_csv(std::ostream& os, const LinearFunction& f, const Potential& pot) {
  if (f.n() != pot.n())
    throw std::invalid_argument("write_potential_csv: dimension mismatch");
  os << "i,w_i,gamma_i,g_i\n";
  for (std::size_t i = 1; i <= pot.n(); ++i) {
    os << i << ',' << f.weight(i - 1) << ',';
    if (pot.kind == PotentialKind::adaptive)
      os << adaptive_gamma(i, pot.n(), pot.p, pot.alpha);
    os << ',' << pot.g[i - 1] << '\n';
  }
}

}  // namespace ealab
