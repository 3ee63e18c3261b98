#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relmap/errors.hpp"
#include "relmap/reliability.hpp"
#include "relmap/special_functions.hpp"

using namespace relmap;

namespace {
ConjugatePosterior beta_post(double a, double b) { return {Family::beta, a, b}; }
}  // namespace

TEST_CASE("beta posterior parameter addition") {
  const BetaPrior prior{0.5, 49.5};
  const auto p1 = beta_posterior({"adams", "black", 2019, 2, 9}, prior);
  CHECK(p1.family == Family::beta);
  CHECK(p1.shape1 == doctest::Approx(2.5));
  CHECK(p1.shape2 == doctest::Approx(56.5));
  const auto p2 = beta_posterior({"r", "s", 2020, 16, 1600}, prior);
  CHECK(p2.shape1 == doctest::Approx(16.5));
  CHECK(p2.shape2 == doctest::Approx(1633.5));
  // shape1 + shape2 = n + a + b
  CHECK(p2.shape1 + p2.shape2 == doctest::Approx(1600.0 + 50.0));
}

TEST_CASE("beta posterior rejects zero trials") {
  CHECK_THROWS_AS(beta_posterior({"r", "s", 2020, 0, 0}, BetaPrior{0.5, 49.5}),
                  validation_error);
  CHECK_THROWS_AS(beta_posterior({"r", "s", 2020, 3, 2}, BetaPrior{0.5, 49.5}),
                  validation_error);
}

TEST_CASE("gamma posterior parameter addition") {
  const auto g1 = gamma_posterior({"r", "s", 2020, 0, 100}, 1.0, 1.0);
  CHECK(g1.family == Family::gamma);
  CHECK(g1.shape1 == doctest::Approx(1.0));
  CHECK(g1.shape2 == doctest::Approx(101.0));
  const auto g2 = gamma_posterior({"r", "s", 2020, 16, 1000}, 0.5, 50.0);
  CHECK(g2.shape1 == doctest::Approx(16.5));
  CHECK(g2.shape2 == doctest::Approx(1050.0));
}

TEST_CASE("posterior coefficient of variation") {
  CHECK(posterior_cv(beta_post(1.0, 1.0)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(posterior_cv(beta_post(16.5, 1633.5)) < 0.25);  // the 16-case boundary
  CHECK(posterior_cv({Family::gamma, 16.0, 123.0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cv identity against moment arithmetic") {
  // same quantity via mean/variance of the beta distribution
  for (double a : {0.5, 1.0, 7.2, 113.0, 1e4}) {
    for (double b : {0.5, 2.0, 49.5, 5e3, 1e4}) {
      const double mean = a / (a + b);
      const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
      const double via_moments = std::sqrt(var) / mean;
      CHECK(posterior_cv(beta_post(a, b)) == doctest::Approx(via_moments).epsilon(1e-12));
    }
  }
}

TEST_CASE("prior construction from a rate guess") {
  const auto p1 = prior_from_rate(0.01, 0.5);
  CHECK(p1.prior_cases == doctest::Approx(0.5));
  CHECK(p1.prior_noncases == doctest::Approx(49.5));
  const auto p2 = prior_from_rate(0.5, 1.0);
  CHECK(p2.prior_noncases == doctest::Approx(1.0));
  const auto p3 = prior_from_rate(0.10, 7.2);
  CHECK(p3.prior_noncases == doctest::Approx(64.8));
  // prior mean equals the rate guess
  CHECK(p3.prior_cases / (p3.prior_cases + p3.prior_noncases) == doctest::Approx(0.10));
  CHECK_THROWS_AS(prior_from_rate(0.0, 0.5), validation_error);
  CHECK_THROWS_AS(prior_from_rate(1.0, 0.5), validation_error);
}

TEST_CASE("prior information budget") {
  CHECK(max_prior_info(0.10) == 7.2);                     // 16 * 0.9 / 2, exact
  CHECK(2.0 * max_prior_info(0.10) == 14.4);              // posterior-case threshold
  CHECK(max_prior_info(1e-13) == doctest::Approx(8.0));   // small-rate limit
  CHECK(max_prior_info(0.2, 20.0) == doctest::Approx(8.0));
}

TEST_CASE("equal-tailed credible intervals") {
  const auto [u_lo, u_hi] = equal_tailed_ci(beta_post(1.0, 1.0), 0.95);
  CHECK(u_lo == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(u_hi == doctest::Approx(0.975).epsilon(1e-9));

  // frozen from an independent quantile oracle (adaptive quadrature of the density)
  const auto [lo, hi] = equal_tailed_ci(beta_post(2.5, 56.5), 0.95);
  CHECK(lo == doctest::Approx(0.007233741816424229).epsilon(1e-7));
  CHECK(hi == doctest::Approx(0.10604107490264335).epsilon(1e-7));
  CHECK(lo < 2.5 / 59.0);
  CHECK(hi > 2.5 / 59.0);

  // exponential closed form
  const auto [g_lo, g_hi] = equal_tailed_ci({Family::gamma, 1.0, 1.0}, 0.90);
  CHECK(g_lo == doctest::Approx(-std::log(0.95)).epsilon(1e-9));
  CHECK(g_hi == doctest::Approx(-std::log(0.05)).epsilon(1e-9));
}

TEST_CASE("interval width is invariant under rate reflection") {
  for (double a : {0.5, 2.5, 16.5, 200.0}) {
    for (double b : {0.5, 56.5, 1633.5}) {
      const auto [lo1, hi1] = equal_tailed_ci(beta_post(a, b), 0.95);
      const auto [lo2, hi2] = equal_tailed_ci(beta_post(b, a), 0.95);
      CHECK(hi1 - lo1 == doctest::Approx(hi2 - lo2).epsilon(1e-10));
      // reflected endpoints line up as well
      CHECK(lo2 == doctest::Approx(1.0 - hi1).epsilon(1e-8));
    }
  }
}

TEST_CASE("relative precision and the reliable flag") {
  // frozen from the scipy quantile oracle
  CHECK(relative_precision(beta_post(16.5, 1633.5), 0.95) ==
        doctest::Approx(1.0265840414806011).epsilon(1e-6));
  CHECK(relative_precision(beta_post(15.5, 1634.5), 0.95) ==
        doctest::Approx(0.9937054524024528).epsilon(1e-6));
  CHECK(is_reliable(beta_post(16.5, 1633.5), 0.95));
  CHECK_FALSE(is_reliable(beta_post(15.5, 1634.5), 0.95));
  CHECK_FALSE(is_reliable(beta_post(0.5, 49.5), 0.95));  // zero observed cases

  // rate and its opposite receive identical values
  for (double a : {0.7, 3.0, 16.5}) {
    for (double b : {5.0, 49.5, 1633.5}) {
      CHECK(relative_precision(beta_post(a, b), 0.95) ==
            doctest::Approx(relative_precision(beta_post(b, a), 0.95)).epsilon(1e-10));
    }
  }

  // vanishing level: interval shrinks to the median, always reliable
  CHECK(is_reliable(beta_post(0.5, 49.5), 1e-6));
}

TEST_CASE("continuous reliability level") {
  // y=11 at pi0=0.01 sits near the 0.90 level, y=7 near 0.80
  CHECK(reliability_level(beta_post(11.5, 1138.5)) ==
        doctest::Approx(0.9056625928878785).epsilon(6e-4));
  CHECK(reliability_level(beta_post(7.5, 742.5)) ==
        doctest::Approx(0.8204347162246706).epsilon(6e-4));
  CHECK(reliability_level(beta_post(16.5, 1633.5)) ==
        doctest::Approx(0.9557207765579223).epsilon(6e-4));

  // opposite symmetry
  CHECK(reliability_level(beta_post(3.0, 80.0)) ==
        doctest::Approx(reliability_level(beta_post(80.0, 3.0))).epsilon(1e-9));

  // ceiling clamp; a nearly-flat posterior still has an interior level
  // because the interval width vanishes as the level does
  CHECK(reliability_level(beta_post(1e5, 1e5)) == doctest::Approx(0.999));
  CHECK(reliability_level(beta_post(0.6, 1e6)) ==
        doctest::Approx(0.23905836313962936).epsilon(6e-4));
}

TEST_CASE("required cases reproduce the fixed-rate thresholds") {
  const auto r1 = required_cases(0.01, 0.5, 0.95);
  REQUIRE(r1.attainable);
  CHECK(r1.cases == 16);
  CHECK(required_cases(0.20, 0.5, 0.95).cases == 12);
  CHECK(required_cases(0.40, 0.5, 0.95).cases == 9);
  CHECK(required_cases(0.01, 0.5, 0.90).cases == 11);
  CHECK(required_cases(0.01, 0.5, 0.80).cases == 7);
}

TEST_CASE("required cases with a fixed trial count") {
  // n too small for any reliable estimate
  const auto r = required_cases(0.5, 0.5, 0.95, 4);
  CHECK_FALSE(r.attainable);
  // n pinned at the tied-rate value recovers the fixed-rate answer
  const auto r2 = required_cases(0.20, 0.5, 0.95, 60);
  CHECK(r2.attainable);
  CHECK(r2.cases == 12);
}

TEST_CASE("threshold consistency with the reliability level") {
  for (double pi0 : {0.01, 0.1, 0.2, 0.4}) {
    for (double level : {0.80, 0.90, 0.95}) {
      const auto rc = required_cases(pi0, 0.5, level);
      REQUIRE(rc.attainable);
      const BetaPrior prior = prior_from_rate(pi0, 0.5);
      const long long y = rc.cases;
      const long long n = std::max<long long>(1, std::llround(y / pi0));
      const auto at = beta_posterior({"g", "", 0, y, n}, prior);
      CHECK(reliability_level(at) >= level - 1e-3);
      if (y > 0) {
        const long long n0 = std::max<long long>(1, std::llround((y - 1) / pi0));
        const auto below = beta_posterior({"g", "", 0, y - 1, n0}, prior);
        CHECK(reliability_level(below) < level + 1e-3);
      }
    }
  }
}

TEST_CASE("relative precision is nondecreasing in events along fixed-rate curves") {
  for (double pi0 : {0.01, 0.1, 0.2, 0.4}) {
    const BetaPrior prior = prior_from_rate(pi0, 0.5);
    double prev = 0.0;
    for (long long y = 0; y <= 100; ++y) {
      const long long n = std::max<long long>(1, std::llround(y / pi0));
      const double rp =
          relative_precision(beta_posterior({"g", "", 0, y, n}, prior), 0.95);
      CHECK(rp >= prev - 1e-9);
      prev = rp;
    }
  }
}

TEST_CASE("assessment bundles the pieces consistently") {
  const auto a = assess(beta_post(16.5, 1633.5), 0.95);
  CHECK(a.ci_low <= a.median);
  CHECK(a.median <= a.ci_high);
  CHECK(a.reliable == (a.relative_precision > 1.0));
  CHECK(a.level_used == 0.95);
  CHECK(a.median == doctest::Approx(0.009802678378529776).epsilon(1e-7));
}
