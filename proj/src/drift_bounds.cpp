#include "ealab/drift_bounds.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ealab {

namespace {
// (1-p)^e computed as exp(e * log1p(-p)).
double pow1m(double p, double e) { return std::exp(e * std::log1p(-p)); }
}  // namespace

MultDriftUpper mult_drift_upper(double delta, double s0, double t) {
  if (!(delta > 0.0)) throw std::invalid_argument("mult_drift_upper: delta must be > 0");
  if (!(s0 >= 1.0)) throw std::invalid_argument("mult_drift_upper: s0 must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("mult_drift_upper: t must be >= 0");
  return MultDriftUpper{(std::log(s0) + 1.0) / delta, (std::log(s0) + t) / delta,
                        std::exp(-t)};
}

double mult_drift_lower(double delta, double beta, double s0, double smin) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("mult_drift_lower: delta must be in (0, 1]");
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("mult_drift_lower: beta must be in (0, 1]");
  if (!(smin > 0.0)) throw std::invalid_argument("mult_drift_lower: smin must be > 0");
  if (!(s0 > smin)) throw std::invalid_argument("mult_drift_lower: need s0 > smin");
  return (std::log(s0) - std::log(smin)) / delta * (1.0 - beta) / (1.0 + beta);
}

double additive_drift_lower(double g, double u) {
  if (!(g > 0.0) || !(u > 0.0))
    throw std::invalid_argument("additive_drift_lower: g and u must be > 0");
  return g / u;
}

double general_upper_bound(std::size_t n, double p, double alpha, double t) {
  if (n == 0) throw std::invalid_argument("general_upper_bound: n must be >= 1");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("general_upper_bound: p must be in (0, 1)");
  if (!(alpha > 1.0)) throw std::invalid_argument("general_upper_bound: alpha must be > 1");
  if (!(t >= 0.0)) throw std::invalid_argument("general_upper_bound: t must be >= 0");
  const double dn = static_cast<double>(n);
  const double q = pow1m(p, 1.0 - dn);  // (1-p)^{1-n}
  const double a = alpha;
  return q * (dn * a * a * q / (a - 1.0) +
              (a / (a - 1.0)) * (std::log(1.0 / p) + (dn - 1.0) * std::log1p(-p) + t) / p);
}

namespace {
double constant_mut_leading(std::size_t n, double c) {
  if (n < 2) throw std::invalid_argument("constant_mut bound: n must be >= 2");
  if (!(c > 0.0)) throw std::invalid_argument("constant_mut bound: c must be > 0");
  const double dn = static_cast<double>(n);
  return std::exp(c) / c * dn * std::log(dn);
}
}  // namespace

double constant_mut_upper(std::size_t n, double c) { return constant_mut_leading(n, c); }
double constant_mut_lower(std::size_t n, double c) { return constant_mut_leading(n, c); }

RefinedUpper refined_upper_bound(std::size_t n, double t) {
  if (n < 4) throw std::invalid_argument("refined_upper_bound: n must be >= 4");
  if (!(t >= 0.0)) throw std::invalid_argument("refined_upper_bound: t must be >= 0");
  const double dn = static_cast<double>(n);
  const double e = std::exp(1.0);
  return RefinedUpper{e * dn * std::log(dn) + 2.0 * e * dn,
                      e * dn * (std::log(dn) + t + 1.0), std::exp(-t)};
}

double small_p_lower_bound(std::size_t n, double p) {
  if (n < 2) throw std::invalid_argument("small_p_lower_bound: n must be >= 2");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("small_p_lower_bound: p must be in (0, 1)");
  const double dn = static_cast<double>(n);
  const double log_arg = -3.0 * std::log(p) - 2.0 * std::log(dn);  // ln(1/(p^3 n^2))
  if (!(log_arg > 0.0))
    throw std::domain_error("small_p_lower_bound: outside theorem regime (p too large)");
  return pow1m(p, -dn) * (1.0 / p) * std::min(std::log(dn), log_arg);
}

double onemax_drift_bound(std::size_t i, std::size_t n, double p) {
  if (i > n) throw std::invalid_argument("onemax_drift_bound: need i <= n");
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("onemax_drift_bound: p must be in (0, 1)");
  const double di = static_cast<double>(i);
  return di * p * std::pow(1.0 - p + di * p * p / (1.0 - p),
                           static_cast<double>(n - i));
}

std::vector<BoundReport> bound_report_table(std::size_t n, double p, double alpha,
                                            double t) {
  std::vector<BoundReport> table;
  const double dn = static_cast<double>(n);
  const double c = p * dn;

  {
    BoundReport r;
    r.id = "general-upper-b(t)";
    r.inputs = {{"n", dn}, {"p", p}, {"alpha", alpha}, {"t", t}};
    r.value = general_upper_bound(n, p, alpha, t);
    r.kind = BoundKind::tail;
    r.note = "exceeded with probability <= " + std::to_string(std::exp(-t));
    table.push_back(r);
  }
  {
    BoundReport r;
    r.id = "general-upper-b(1)";
    r.inputs = {{"n", dn}, {"p", p}, {"alpha", alpha}};
    r.value = general_upper_bound(n, p, alpha, 1.0);
    r.kind = BoundKind::expectation_upper;
    table.push_back(r);
  }
  if (n >= 4) {
    const auto ref = refined_upper_bound(n, t);
    BoundReport r;
    r.id = "refined-upper";
    r.inputs = {{"n", dn}};
    r.value = ref.expectation_bound;
    r.kind = BoundKind::expectation_upper;
    r.asymptotic_terms_dropped = true;  // the +O(1)
    r.note = "valid for p = 1/n";
    table.push_back(r);
    BoundReport rt;
    rt.id = "refined-upper-tail";
    rt.inputs = {{"n", dn}, {"t", t}};
    rt.value = ref.tail_threshold;
    rt.kind = BoundKind::tail;
    rt.asymptotic_terms_dropped = true;
    rt.note = "exceeded with probability <= " + std::to_string(ref.tail_prob) +
              "; valid for p = 1/n";
    table.push_back(rt);
  }
  {
    BoundReport r;
    r.id = "small-p-lower";
    r.inputs = {{"n", dn}, {"p", p}};
    r.kind = BoundKind::expectation_lower;
    r.asymptotic_terms_dropped = true;  // the (1-o(1))
    try {
      r.value = small_p_lower_bound(n, p);
    } catch (const std::domain_error&) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.note = "outside regime: ln(1/(p^3 n^2)) <= 0";
    }
    table.push_back(r);
  }
  if (n >= 2 && c > 0.0) {
    BoundReport up;
    up.id = "constant-mut-upper";
    up.inputs = {{"n", dn}, {"c", c}};
    up.value = constant_mut_upper(n, c);
    up.kind = BoundKind::expectation_upper;
    up.asymptotic_terms_dropped = true;
    up.note = "leading term (e^c/c) n ln n for p = c/n";
    table.push_back(up);
    BoundReport lo = up;
    lo.id = "constant-mut-lower";
    lo.value = constant_mut_lower(n, c);
    lo.kind = BoundKind::expectation_lower;
    table.push_back(lo);
  }
  {
    BoundReport r;
    r.id = "ln-initial-potential-adaptive";
    r.inputs = {{"n", dn}, {"p", p}, {"alpha", alpha}};
    r.value = dn * alpha * p * pow1m(p, 1.0 - dn) + std::log(1.0 / p) +
              (dn - 1.0) * std::log1p(-p);
    r.kind = BoundKind::expectation_upper;
    table.push_back(r);
  }
  if (n >= 2) {
    BoundReport r;
    r.id = "ln-initial-potential-refined";
    r.inputs = {{"n", dn}};
    r.value = std::log(dn) + 1.0;
    r.kind = BoundKind::expectation_upper;
    table.push_back(r);
  }
  return table;
}

std::string bound_table_to_text(const std::vector<BoundReport>& table) {
  std::ostringstream os;
  os << std::left << std::setw(30) << "bound" << std::setw(18) << "value"
     << std::setw(12) << "kind" << "note\n";
  for (const auto& r : table) {
    const char* kind = r.kind == BoundKind::expectation_upper   ? "E-upper"
                       : r.kind == BoundKind::expectation_lower ? "E-lower"
                                                                : "tail";
    std::ostringstream val;
    val << std::setprecision(10) << r.value;
    os << std::left << std::setw(30) << r.id << std::setw(18) << val.str()
       << std::setw(12) << kind;
    if (r.asymptotic_terms_dropped) os << "[asymptotic terms dropped] ";
    os << r.note << '\n';
  }
  return os.str();
}

std::string bound_table_to_json(const std::vector<BoundReport>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : table) {
    nlohmann::json e;
    e["id"] = r.id;
    for (const auto& [k, v] : r.inputs) e["inputs"][k] = v;
    if (std::isnan(r.value))
      e["value"] = nullptr;
    else
      e["value"] = r.value;
    e["kind"] = r.kind == BoundKind::expectation_upper   ? "expectation-upper"
                : r.kind == BoundKind::expectation_lower ? "expectation-lower"
                                                         : "tail-threshold";
    e["asymptotic_terms_dropped"] = r.asymptotic_terms_dropped;
    if (!r.note.empty()) e["note"] = r.note;
    j.push_back(e);
  }
  return j.dump(2);
}

}  // namespace ealab
