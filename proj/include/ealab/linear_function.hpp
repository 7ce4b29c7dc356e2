#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ealab/bitstring.hpp"

namespace ealab {

// Linear pseudo-boolean function in normal form: f(x) = sum_i w_i x_i with
// w_n >= ... >= w_1 > 0 and zero constant term.  Minimization; the all-zeros
// string is the unique optimum with value 0.  Immutable after construction.
class LinearFunction {
 public:
  explicit LinearFunction(std::vector<double> ascending_weights);

  std::size_t n() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t k) const { return weights_.at(k); }  // 0-based, w_{k+1}

  double evaluate(const BitString& x) const;

 private:
  std::vector<double> weights_;
};

// How a raw linear function was rewritten into normal form.  Applying the
// permutation and flips to a point and evaluating the normalized function,
// then adding dropped_constant, reproduces the original value.
struct NormalizationRecord {
  std::vector<std::size_t> new_index_of;  // old 0-based index -> new 0-based index
  std::vector<std::uint8_t> flipped;      // old index: 1 if the bit meaning was negated
  double dropped_constant = 0.0;

  BitString map_point(const BitString& original) const;
};

struct NormalizedFunction {
  LinearFunction fn;
  NormalizationRecord record;
};

// Rewrites raw weights (any sign, optional constant term) into normal form.
// Zero weights are rejected.
NormalizedFunction normalize(const std::vector<double>& raw_weights, double constant = 0.0);

enum class FamilyKind { onemax, binval, random_uniform, random_exponential };

std::string family_kind_name(FamilyKind kind);
FamilyKind family_kind_from_name(const std::string& name);

// Description of a function instance, serializable as JSON:
// {"kind": "...", "n": ..., "seed": ..., "kappa": ...} or {"weights": [...]}.
struct FunctionSpec {
  FamilyKind kind = FamilyKind::onemax;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double kappa = 5.0;                          // random_exponential exponent
  std::optional<std::vector<double>> weights;  // explicit weights, overrides kind

  std::string to_json() const;
  static FunctionSpec from_json(const std::string& text);
  std::string label() const;  // short deterministic identifier for file names
};

// Largest n for which every binval weight 2^{i-1} (and the all-ones value
// 2^n - 1, up to rounding) fits the 64-bit float weight representation.
// Subset sums are exact integers up to 53 bits; beyond that they round, but
// selection decisions of the EAs stay exact at any supported n because the
// largest flipped weight dominates the sign of any weight-difference sum.
inline constexpr std::size_t kBinValMaxBits = 1023;

// Standard families.  Random families draw i.i.d. positive weights from the
// seed and sort them ascending; the same seed yields identical weights.
LinearFunction make_family(FamilyKind kind, std::size_t n, std::uint64_t seed,
                           double kappa = 5.0);

LinearFunction resolve(const FunctionSpec& spec);

}  // namespace ealab
