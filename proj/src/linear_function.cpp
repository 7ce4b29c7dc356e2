#include "ealab/linear_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ealab {

LinearFunction::LinearFunction(std::vector<double> ascending_weights)
    : weights_(std::move(ascending_weights)) {
  if (weights_.empty()) throw std::invalid_argument("LinearFunction: n must be >= 1");
  double prev = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("LinearFunction: weights must be positive and finite");
    if (w < prev) throw std::invalid_argument("LinearFunction: weights must be ascending");
    prev = w;
  }
}

double LinearFunction::evaluate(const BitString& x) const {
  if (x.n() != n()) throw std::invalid_argument("evaluate: dimension mismatch");
  double sum = 0.0;
  const auto& bits = x.bits();
  for (std::size_t k = 0; k < weights_.size(); ++k)
    if (bits[k]) sum += weights_[k];
  return sum;
}

BitString NormalizationRecord::map_point(const BitString& original) const {
  if (original.n() != new_index_of.size())
    throw std::invalid_argument("map_point: dimension mismatch");
  BitString mapped(original.n());
  for (std::size_t k = 0; k < new_index_of.size(); ++k) {
    bool v = original.get(k);
    if (flipped[k]) v = !v;
    mapped.set(new_index_of[k], v);
  }
  return mapped;
}

NormalizedFunction normalize(const std::vector<double>& raw_weights, double constant) {
  const std::size_t n = raw_weights.size();
  if (n == 0) throw std::invalid_argument("normalize: n must be >= 1");

  NormalizationRecord record;
  record.flipped.assign(n, 0);
  record.dropped_constant = constant;
  std::vector<double> positive(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = raw_weights[k];
    if (w == 0.0 || !std::isfinite(w))
      throw std::invalid_argument("normalize: zero (or non-finite) weights are not allowed");
    if (w < 0.0) {
      // w*x = (-w)*(1-x) + w: negate the bit meaning, absorb w into the constant.
      record.flipped[k] = 1;
      record.dropped_constant += w;
      positive[k] = -w;
    } else {
      positive[k] = w;
    }
  }

  // Stable ascending sort keeps tied weights in original order and bit-identical.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return positive[a] < positive[b]; });

  std::vector<double> sorted(n);
  record.new_index_of.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    sorted[pos] = positive[order[pos]];
    record.new_index_of[order[pos]] = pos;
  }
  return NormalizedFunction{LinearFunction(std::move(sorted)), std::move(record)};
}

std::string family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::onemax: return "onemax";
    case FamilyKind::binval: return "binval";
    case FamilyKind::random_uniform: return "random-uniform";
    case FamilyKind::random_exponential: return "random-exponential";
  }
  throw std::logic_error("family_kind_name: bad kind");
}

FamilyKind family_kind_from_name(const std::string& name) {
  if (name == "onemax") return FamilyKind::onemax;
  if (name == "binval") return FamilyKind::binval;
  if (name == "random-uniform" || name == "uniform") return FamilyKind::random_uniform;
  if (name == "random-exponential" || name == "exponential")
    return FamilyKind::random_exponential;
  throw std::invalid_argument("unknown function family: " + name);
}

LinearFunction make_family(FamilyKind kind, std::size_t n, std::uint64_t seed, double kappa) {
  if (n == 0) throw std::invalid_argument("make_family: n must be >= 1");
  std::vector<double> w(n);
  switch (kind) {
    case FamilyKind::onemax:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case FamilyKind::binval: {
      if (n > kBinValMaxBits)
        throw std::invalid_argument(
            "make_family: binval weights exceed the exact width of the weight "
            "representation; n must be <= " +
            std::to_string(kBinValMaxBits));
      double v = 1.0;
      for (std::size_t k = 0; k < n; ++k, v *= 2.0) w[k] = v;
      break;
    }
    case FamilyKind::random_uniform: {
      SplitMix64 rng(detail::mix64(seed ^ 0x756E69666F726DULL));
      for (auto& x : w) x = rng.next_unit_open();
      std::sort(w.begin(), w.end());
      break;
    }
    case FamilyKind::random_exponential: {
      if (!(kappa > 0)) throw std::invalid_argument("make_family: kappa must be positive");
      SplitMix64 rng(detail::mix64(seed ^ 0x657870ULL));
      for (auto& x : w) x = std::pow(rng.next_unit_open(), kappa);
      std::sort(w.begin(), w.end());
      break;
    }
  }
  return LinearFunction(std::move(w));
}

LinearFunction resolve(const FunctionSpec& spec) {
  if (spec.weights) return LinearFunction(*spec.weights);
  return make_family(spec.kind, spec.n, spec.seed, spec.kappa);
}

std::string FunctionSpec::to_json() const {
  nlohmann::json j;
  if (weights) {
    j["weights"] = *weights;
  } else {
    j["kind"] = family_kind_name(kind);
    j["n"] = n;
    j["seed"] = seed;
    if (kind == FamilyKind::random_exponential) j["kappa"] = kappa;
  }
  return j.dump();
}

FunctionSpec FunctionSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FunctionSpec spec;
  if (j.contains("weights")) {
    spec.weights = j.at("weights").get<std::vector<double>>();
    spec.n = spec.weights->size();
    return spec;
  }
  spec.kind = family_kind_from_name(j.at("kind").get<std::string>());
  spec.n = j.at("n").get<std::size_t>();
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.kappa = j.value("kappa", 5.0);
  return spec;
}

std::string FunctionSpec::label() const {
  std::ostringstream os;
  if (weights) {
    os << "explicit" << weights->size();
    return os.str();
  }
  os << family_kind_name(kind);
  if (kind == FamilyKind::random_uniform || kind == FamilyKind::random_exponential)
    os << "-s" << seed;
  return os.str();
}

}  // namespace ealab
