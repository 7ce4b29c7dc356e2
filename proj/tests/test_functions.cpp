#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ealab/linear_function.hpp"

using namespace ealab;

TEST_CASE("evaluate on the standard families") {
  const auto onemax = make_family(FamilyKind::onemax, 4, 0);
  CHECK(onemax.evaluate(BitString::from_msb_string("1011")) == doctest::Approx(3.0));

  const auto binval = make_family(FamilyKind::binval, 3, 0);
  CHECK(binval.evaluate(BitString::from_msb_string("101")) == doctest::Approx(5.0));

  CHECK(onemax.evaluate(BitString::zeros(4)) == 0.0);
  CHECK(binval.evaluate(BitString::zeros(3)) == 0.0);
}

TEST_CASE("evaluate rejects dimension mismatch") {
  const auto f = make_family(FamilyKind::onemax, 4, 0);
  CHECK_THROWS_AS(f.evaluate(BitString::zeros(5)), std::invalid_argument);
}

TEST_CASE("family construction") {
  const auto onemax = make_family(FamilyKind::onemax, 3, 0);
  CHECK(onemax.weights() == std::vector<double>{1.0, 1.0, 1.0});

  const auto binval = make_family(FamilyKind::binval, 3, 0);
  CHECK(binval.weights() == std::vector<double>{1.0, 2.0, 4.0});

  CHECK_THROWS_AS(make_family(FamilyKind::onemax, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_family(FamilyKind::binval, kBinValMaxBits + 1, 0),
                  std::invalid_argument);
  CHECK_NOTHROW(make_family(FamilyKind::binval, kBinValMaxBits, 0));
}

TEST_CASE("random families are seed-deterministic, positive, ascending") {
  for (auto kind : {FamilyKind::random_uniform, FamilyKind::random_exponential}) {
    const auto a = make_family(kind, 5, 42);
    const auto b = make_family(kind, 5, 42);
    const auto c = make_family(kind, 5, 43);
    CHECK(a.weights() == b.weights());
    CHECK(a.weights() != c.weights());
    double prev = 0.0;
    for (double w : a.weights()) {
      CHECK(w > 0.0);
      CHECK(w >= prev);
      prev = w;
    }
  }
}

TEST_CASE("normalize: sign flip and constant") {
  // f(x2, x1) = -3 x2 + 5 x1 + 7  ->  weights (3, 5), bit 2 flipped, constant 4
  const auto [fn, rec] = normalize({5.0, -3.0}, 7.0);
  CHECK(fn.weights() == std::vector<double>{3.0, 5.0});
  CHECK(rec.flipped[0] == 0);
  CHECK(rec.flipped[1] == 1);
  CHECK(rec.dropped_constant == doctest::Approx(4.0));
  // -3 came from position 2 and must land at new position 1 (ascending).
  CHECK(rec.new_index_of[1] == 0);
  CHECK(rec.new_index_of[0] == 1);
}

TEST_CASE("normalize: already normal is the identity record") {
  const auto [fn, rec] = normalize({1.0, 2.0, 4.0});
  CHECK(fn.weights() == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(rec.dropped_constant == 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(rec.new_index_of[k] == k);
    CHECK(rec.flipped[k] == 0);
  }
}

TEST_CASE("normalize: ascending sort permutes indices") {
  const auto [fn, rec] = normalize({5.0, 1.0});
  CHECK(fn.weights() == std::vector<double>{1.0, 5.0});
  CHECK(rec.new_index_of[0] == 1);
  CHECK(rec.new_index_of[1] == 0);
}

TEST_CASE("normalize rejects zero weights") {
  CHECK_THROWS_AS(normalize({1.0, 0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("normalize round-trip identity on random raw functions") {
  SplitMix64 rng(20240811);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.next_below(10);
    std::vector<double> raw(n);
    for (auto& w : raw) {
      w = (rng.next_unit_open() * 10.0) - 5.0;
      if (w == 0.0) w = 0.5;
    }
    const double constant = rng.next_unit() * 20.0 - 10.0;
    const auto [fn, rec] = normalize(raw, constant);

    for (int pt = 0; pt < 100; ++pt) {
      const BitString x = BitString::random(n, rng);
      double direct = constant;
      for (std::size_t k = 0; k < n; ++k)
        if (x.get(k)) direct += raw[k];
      const double via_normal = fn.evaluate(rec.map_point(x)) + rec.dropped_constant;
      CHECK(via_normal == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate is nonnegative with zero only at the optimum, and monotone") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_below(8);
    const auto kind = trial % 2 == 0 ? FamilyKind::random_uniform
                                     : FamilyKind::random_exponential;
    const auto f = make_family(kind, n, rng.next_u64());
    for (int pt = 0; pt < 30; ++pt) {
      BitString x = BitString::random(n, rng);
      const double v = f.evaluate(x);
      if (x.is_zero()) {
        CHECK(v == 0.0);
      } else {
        CHECK(v > 0.0);
        // flipping any one-bit to zero strictly decreases f
        for (std::size_t k = 0; k < n; ++k) {
          if (!x.get(k)) continue;
          BitString y = x;
          y.set(k, false);
          CHECK(f.evaluate(y) < v);
        }
      }
    }
  }
}

TEST_CASE("function spec JSON round-trip") {
  FunctionSpec spec;
  spec.kind = FamilyKind::random_exponential;
  spec.n = 17;
  spec.seed = 99;
  spec.kappa = 3.0;
  const auto back = FunctionSpec::from_json(spec.to_json());
  CHECK(back.kind == spec.kind);
  CHECK(back.n == spec.n);
  CHECK(back.seed == spec.seed);
  CHECK(back.kappa == spec.kappa);
  CHECK(resolve(back).weights() == resolve(spec).weights());

  FunctionSpec explicit_spec;
  explicit_spec.weights = std::vector<double>{1.0, 2.0, 2.0};
  const auto back2 = FunctionSpec::from_json(explicit_spec.to_json());
  REQUIRE(back2.weights.has_value());
  CHECK(*back2.weights == *explicit_spec.weights);
}

TEST_CASE("tied weights stay exactly equal after normalization") {
  const auto [fn, rec] = normalize({2.0, -2.0, 2.0, 1.0});
  CHECK(fn.weights()[1] == fn.weights()[2]);
  CHECK(fn.weights()[2] == fn.weights()[3]);
}
