#pragma once

#include <utility>

#include "relmap/count_data.hpp"

namespace relmap {

enum class Family { beta, gamma };

// Prior pseudo-counts for a rate: prior_cases (a) and prior_noncases (b),
// i.e. a prior population of size a + b with mean a/(a+b).
struct BetaPrior {
  double prior_cases = 0.5;
  double prior_noncases = 49.5;

  void validate() const;
};

// Conjugate posterior for a rate. Beta(shape1, shape2) for binomial counts;
// Gamma(shape1, rate shape2) for Poisson counts.
struct ConjugatePosterior {
  Family family = Family::beta;
  double shape1 = 1.0;
  double shape2 = 1.0;
};

// Point/interval reliability statement for one estimate.
struct ReliabilityAssessment {
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level_used = 0.95;           // 1 - alpha
  double relative_precision = 0.0;    // min(median, 1-median) / CI width
  double reliability_level = 0.0;     // largest 1 - alpha at which reliable
  bool reliable = false;              // relative_precision > 1 at level_used
};

struct RequiredCases {
  bool attainable = false;
  long long cases = 0;
};

// pi | y ~ Beta(y + a, n - y + b). Requires trials >= 1.
ConjugatePosterior beta_posterior(const CountRecord& rec, const BetaPrior& prior);

// Poisson analog: rate | y ~ Gamma(y + prior_shape, n + prior_rate).
ConjugatePosterior gamma_posterior(const CountRecord& rec, double prior_shape,
                                   double prior_rate);

// Coefficient of variation of the posterior. Beta case:
// sqrt(shape2 / (shape1 (shape1 + shape2 + 1))); gamma case: 1/sqrt(shape1).
double posterior_cv(const ConjugatePosterior& post);

// Noninformative-style prior with mean pi0: (a, a (1 - pi0) / pi0).
BetaPrior prior_from_rate(double pi0, double a);

// Prior-case budget multiplier*(1 - pi0)/2 at which prior and data
// contributions balance on the reliability boundary.
double max_prior_info(double pi0, double multiplier = 16.0);

double posterior_median(const ConjugatePosterior& post);

// Equal-tailed credible interval: (quantile(alpha/2), quantile(1 - alpha/2)).
std::pair<double, double> equal_tailed_ci(const ConjugatePosterior& post, double level);

// Beta case: min(m, 1-m) / width, so a rate and its opposite score the same.
// Gamma case (rates unbounded above, no opposite): m / width.
double relative_precision(const ConjugatePosterior& post, double level);

bool is_reliable(const ConjugatePosterior& post, double level);

// Largest 1 - alpha at which the estimate is reliable; bisection to 1e-4,
// clamped to [0.001, 0.999].
double reliability_level(const ConjugatePosterior& post);

// Smallest event count y made reliable at `level` under the prior_from_rate
// prior. When n < 0 the trial count follows the fixed-rate curve
// n = round(y / pi0); otherwise n is held at the supplied value and the
// search stops at y = n (unattainable if no such y exists).
RequiredCases required_cases(double pi0, double a, double level, long long n = -1);

ReliabilityAssessment assess(const ConjugatePosterior& post, double level);

}  // namespace relmap
