#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ealab/drift_bounds.hpp"
#include "ealab/exact_oracles.hpp"
#include "ealab/mutation.hpp"
#include "ealab/rng.hpp"
#include "testutil.hpp"

using namespace ealab;

TEST_CASE("ones distribution small cases") {
  const auto d = exact_mutation_ones_distribution(1, 2, 0.5);
  CHECK(d.probs[0] == doctest::Approx(0.25));
  CHECK(d.probs[1] == doctest::Approx(0.5));
  CHECK(d.probs[2] == doctest::Approx(0.25));

  // i = 0: pure Binomial(n, p)
  const auto b = exact_mutation_ones_distribution(0, 3, 0.25);
  CHECK(b.probs[0] == doctest::Approx(0.421875));
  CHECK(b.probs[1] == doctest::Approx(0.421875));
  CHECK(b.probs[2] == doctest::Approx(0.140625));
  CHECK(b.probs[3] == doctest::Approx(0.015625));
}

TEST_CASE("ones distribution mean is i + (n-2i)p") {
  for (std::size_t n : {1, 2, 5, 17}) {
    for (double p : {0.02, 0.3, 0.7}) {
      for (std::size_t i = 0; i <= n; ++i) {
        const auto d = exact_mutation_ones_distribution(i, n, p);
        const double expected =
            static_cast<double>(i) + (static_cast<double>(n) - 2.0 * i) * p;
        CHECK(d.mean() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(d.renorm_residual < 1e-9);
      }
    }
  }
}

TEST_CASE("ones distribution matches empirical mutation sampling (chi-square)") {
  struct Case {
    std::size_t i, n;
    double p;
  };
  for (const auto& [i, n, p] : {Case{3, 10, 0.1}, Case{0, 8, 0.3}, Case{6, 6, 0.2}}) {
    const auto dist = exact_mutation_ones_distribution(i, n, p);
    BitString x(n);
    for (std::size_t k = 0; k < i; ++k) x.set(k, true);
    const MutationParams params(n, p);
    SplitMix64 rng(mix_key(991, i * 100 + n));
    std::vector<std::size_t> counts(n + 1, 0);
    const std::size_t trials = 1'000'000;
    for (std::size_t t = 0; t < trials; ++t)
      ++counts[mutate(x, params, rng).ones_count()];
    const double pval = testutil::chi_square_gof_pvalue(counts, dist.probs);
    CHECK(pval > 1e-3);
  }
}

TEST_CASE("cdf monotonicity holds for p <= 1/2") {
  // spot value: n=2, p=0.25
  const auto d1 = exact_mutation_ones_distribution(1, 2, 0.25);
  const auto d2 = exact_mutation_ones_distribution(2, 2, 0.25);
  CHECK(d1.cdf(0) == doctest::Approx(0.1875));
  CHECK(d2.cdf(0) == doctest::Approx(0.0625));

  for (std::size_t n = 1; n <= 20; ++n) {
    for (int pi = 1; pi <= 10; ++pi) {
      const auto report = check_mutation_cdf_monotonicity(n, 0.05 * pi);
      CHECK(report.pass);
    }
  }
}

TEST_CASE("cdf monotonicity breaks above 1/2 and reports witnesses") {
  const auto report = check_mutation_cdf_monotonicity(2, 0.8);
  CHECK(!report.pass);
  REQUIRE(report.violation.has_value());
  CHECK(report.violation->i_a < report.violation->i_b);
  // informational pointwise violations are also found for large p
  CHECK(report.pmf_violation_count > 0);
}

TEST_CASE("pointwise pmf comparison is clean at p = 1/n") {
  for (std::size_t n : {4, 8, 16}) {
    const auto report = check_mutation_cdf_monotonicity(n, 1.0 / static_cast<double>(n));
    CHECK(report.pass);
    CHECK(report.pmf_violation_count == 0);
  }
}

TEST_CASE("onemax chain tiny cases") {
  const auto c1 = solve_onemax_chain(1, 0.5);
  CHECK(c1.expected_steps[1] == doctest::Approx(2.0));

  const auto c2 = solve_onemax_chain(2, 0.5);
  CHECK(c2.expected_steps[1] == doctest::Approx(4.0));
  CHECK(c2.expected_steps[2] == doctest::Approx(4.0));
  CHECK(c2.uniform_start_steps == doctest::Approx(3.0));
  CHECK(c2.uniform_start_evals == doctest::Approx(4.0));
}

TEST_CASE("onemax chain rows sum to one and hitting times increase") {
  const auto chain = solve_onemax_chain(40, 0.03);
  for (std::size_t i = 0; i <= 40; ++i) {
    double sum = 0.0;
    for (double q : chain.rows[i]) sum += q;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    if (i > 0) CHECK(chain.expected_steps[i] > chain.expected_steps[i - 1]);
  }
  CHECK(chain.expected_steps[0] == 0.0);
}

TEST_CASE("chain rows equal the ones distribution with selection applied") {
  const std::size_t n = 12;
  const double p = 0.15;
  const auto chain = solve_onemax_chain(n, p);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto dist = exact_mutation_ones_distribution(i, n, p);
    double below = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(chain.rows[i][j] == dist.probs[j]);
      below += dist.probs[j];
    }
    CHECK(chain.rows[i][i] == doctest::Approx(1.0 - below).epsilon(1e-14));
  }
}

TEST_CASE("forward substitution matches a dense solve") {
  const std::size_t n = 25;
  const double p = 0.04;
  const auto chain = solve_onemax_chain(n, p);

  // (I - P restricted to states 1..n) E = 1
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= i; ++j) a[i - 1][j - 1] = -chain.rows[i][j];
    a[i - 1][i - 1] += 1.0;
  }
  const auto e = testutil::solve_dense(a, rhs);
  for (std::size_t i = 1; i <= n; ++i)
    CHECK(chain.expected_steps[i] ==
          doctest::Approx(e[i - 1]).epsilon(1e-9));
}

TEST_CASE("exact drift enumeration matches naive recompute") {
  // Uniform-family weights keep the spread far below the double mantissa, so
  // the naive full-evaluation comparison below decides ties identically.
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng.next_below(7);  // n <= 8
    const auto f = make_family(FamilyKind::random_uniform, n, rng.next_u64());
    const auto pot = build_adaptive_potential(f, 0.2, 2.0);
    BitString a = BitString::random(n, rng);
    const double p = 0.1 + 0.5 * rng.next_unit();

    // naive recompute over all masks
    const double fa = f.evaluate(a);
    const double ga = potential_value(pot, a);
    double naive = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      BitString b = a;
      std::size_t flips = 0;
      for (std::size_t k = 0; k < n; ++k)
        if ((mask >> k) & 1u) {
          b.flip(k);
          ++flips;
        }
      const double prob = std::pow(p, static_cast<double>(flips)) *
                          std::pow(1.0 - p, static_cast<double>(n - flips));
      if (f.evaluate(b) <= fa) naive += prob * (ga - potential_value(pot, b));
    }
    CHECK(exact_one_step_drift(f, pot, a, p) ==
          doctest::Approx(naive).epsilon(1e-11));
  }
}

TEST_CASE("exact drift special values") {
  // at the optimum nothing moves
  const auto f2 = make_family(FamilyKind::onemax, 2, 0);
  const auto id2 = identity_potential(2);
  CHECK(exact_one_step_drift(f2, id2, BitString::zeros(2), 0.5) == 0.0);

  // onemax, identity potential, a = (1,0), p = 1/2
  CHECK(exact_one_step_drift(f2, id2, BitString::from_msb_string("01"), 0.5) ==
        doctest::Approx(0.25));

  // binval n=3, adaptive potential, all-ones: enumeration confirms the (*) bound
  const auto f3 = make_family(FamilyKind::binval, 3, 0);
  const auto pot3 = build_adaptive_potential(f3, 1.0 / 3.0, 2.0);
  const double drift = exact_one_step_drift(f3, pot3, BitString::ones(3), 1.0 / 3.0);
  const double s = potential_value(pot3, BitString::ones(3));
  const double bound = s * (1.0 / 3.0) * (4.0 / 9.0) * 0.5;
  CHECK(bound == doctest::Approx(0.5185).epsilon(1e-3));
  CHECK(drift >= bound);

  CHECK_THROWS_AS(exact_one_step_drift(make_family(FamilyKind::onemax, 17, 0),
                                       identity_potential(17), BitString::zeros(17), 0.1),
                  std::invalid_argument);
}

TEST_CASE("exact drift ties the chain row to the mask enumeration") {
  const std::size_t n = 10;
  for (double p : {0.05, 0.2, 0.45}) {
    const auto chain = solve_onemax_chain(n, p);
    const auto f = make_family(FamilyKind::onemax, n, 0);
    const auto id = identity_potential(n);
    for (std::size_t i = 0; i <= n; ++i) {
      BitString a(n);
      for (std::size_t k = 0; k < i; ++k) a.set(k, true);
      const double by_mask = exact_one_step_drift(f, id, a, p);
      CHECK(std::abs(by_mask - chain.one_step_drift(i)) < 1e-12);
    }
  }
}

TEST_CASE("drift condition verification") {
  // refined bound s/(en) on onemax n=8
  const auto onemax8 = make_family(FamilyKind::onemax, 8, 0);
  const auto r1 = verify_drift_condition(onemax8, PotentialKind::refined, 1.0 / 8.0, 0.0,
                                         50, 7);
  CHECK(r1.pass);

  // adaptive across random functions
  SplitMix64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.next_below(9);
    const auto f = make_family(FamilyKind::random_exponential, n, rng.next_u64());
    for (double p : {1.0 / static_cast<double>(n), 2.0 / static_cast<double>(n), 0.3}) {
      const auto rep = verify_drift_condition(f, PotentialKind::adaptive, p, 2.0, 20,
                                              rng.next_u64());
      CHECK(rep.pass);
    }
  }

  // identity potential on binval with large p violates the bound
  const auto binval8 = make_family(FamilyKind::binval, 8, 0);
  const auto bad =
      verify_drift_condition(binval8, PotentialKind::identity, 2.0 / 8.0, 2.0, 0, 1);
  CHECK(!bad.pass);
  REQUIRE(bad.violating_point.has_value());
  CHECK(bad.violating_drift < bad.violating_bound);

  CHECK_THROWS_AS(verify_drift_condition(onemax8, PotentialKind::refined, 0.2, 0.0, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("onemax drift dominance scan") {
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(0.01 * k);
  const auto scan = scan_onemax_drift_dominance(12, grid);
  CHECK(scan.pass);
  CHECK(scan.checked == 12 * 13 / 2 * 50 + 12 * 50);  // sum_{n<=12}(n+1) states per p
  // at i = n the bound is exactly n*p, met with equality
  CHECK(scan.min_margin >= -1e-12);
}
