#include "relmap/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relmap/errors.hpp"
#include "relmap/special_functions.hpp"

namespace relmap {

namespace {

constexpr double kLevelFloor = 0.001;
constexpr double kLevelCeil = 0.999;
constexpr double kLevelTol = 1e-4;
constexpr long long kOpenSearchCap = 100000;

double quantile(const ConjugatePosterior& post, double p) {
  if (post.family == Family::beta) return beta_quantile(p, post.shape1, post.shape2);
  return gamma_quantile(p, post.shape1, post.shape2);
}

void check_posterior(const ConjugatePosterior& post) {
  if (!(post.shape1 > 0.0) || !(post.shape2 > 0.0)) {
    throw validation_error("conjugate posterior requires strictly positive shapes");
  }
}

void check_level(double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw validation_error("credible level must lie in (0,1), got " + std::to_string(level));
  }
}

}  // namespace

void CountRecord::validate() const {
  if (region_id.empty()) throw validation_error("count record missing region id");
  if (events < 0) throw validation_error("negative event count for region " + region_id);
  if (trials < 0) throw validation_error("negative trial count for region " + region_id);
  if (events > trials) {
    throw validation_error("events (" + std::to_string(events) + ") exceed trials (" +
                           std::to_string(trials) + ") for region " + region_id);
  }
}

void BetaPrior::validate() const {
  if (!(prior_cases > 0.0) || !(prior_noncases > 0.0)) {
    throw validation_error("beta prior requires positive prior_cases and prior_noncases");
  }
}

ConjugatePosterior beta_posterior(const CountRecord& rec, const BetaPrior& prior) {
  rec.validate();
  prior.validate();
  if (rec.trials < 1) {
    throw validation_error("beta posterior requires trials >= 1 (region " + rec.region_id + ")");
  }
  return {Family::beta, rec.events + prior.prior_cases,
          (rec.trials - rec.events) + prior.prior_noncases};
}

ConjugatePosterior gamma_posterior(const CountRecord& rec, double prior_shape,
                                   double prior_rate) {
  rec.validate();
  if (!(prior_shape > 0.0) || !(prior_rate > 0.0)) {
    throw validation_error("gamma prior requires positive shape and rate");
  }
  if (rec.trials < 1) {
    throw validation_error("gamma posterior requires trials >= 1 (region " + rec.region_id + ")");
  }
  return {Family::gamma, rec.events + prior_shape, rec.trials + prior_rate};
}

double posterior_cv(const ConjugatePosterior& post) {
  check_posterior(post);
  if (post.family == Family::beta) {
    return std::sqrt(post.shape2 / (post.shape1 * (post.shape1 + post.shape2 + 1.0)));
  }
  return 1.0 / std::sqrt(post.shape1);
}

BetaPrior prior_from_rate(double pi0, double a) {
  if (!(pi0 > 0.0) || !(pi0 < 1.0)) {
    throw validation_error("prior rate must lie in (0,1), got " + std::to_string(pi0));
  }
  if (!(a > 0.0)) throw validation_error("prior_cases must be positive");
  return {a, a * (1.0 - pi0) / pi0};
}

double max_prior_info(double pi0, double multiplier) {
  if (!(pi0 > 0.0) || !(pi0 < 1.0)) {
    throw validation_error("rate must lie in (0,1), got " + std::to_string(pi0));
  }
  return multiplier * (1.0 - pi0) / 2.0;
}

double posterior_median(const ConjugatePosterior& post) {
  check_posterior(post);
  return quantile(post, 0.5);
}

std::pair<double, double> equal_tailed_ci(const ConjugatePosterior& post, double level) {
  check_posterior(post);
  check_level(level);
  const double alpha = 1.0 - level;
  return {quantile(post, alpha / 2.0), quantile(post, 1.0 - alpha / 2.0)};
}

double relative_precision(const ConjugatePosterior& post, double level) {
  const auto [lo, hi] = equal_tailed_ci(post, level);
  const double width = hi - lo;
  if (!(width > 0.0)) throw numeric_error("degenerate posterior: zero-width credible interval");
  const double m = posterior_median(post);
  if (post.family == Family::beta) return std::min(m, 1.0 - m) / width;
  return m / width;
}

bool is_reliable(const ConjugatePosterior& post, double level) {
  return relative_precision(post, level) > 1.0;
}

double reliability_level(const ConjugatePosterior& post) {
  if (is_reliable(post, kLevelCeil)) return kLevelCeil;
  if (!is_reliable(post, kLevelFloor)) return kLevelFloor;
  double lo = kLevelFloor, hi = kLevelCeil;  // reliable at lo, not at hi
  while (hi - lo > kLevelTol) {
    const double mid = 0.5 * (lo + hi);
    if (is_reliable(post, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RequiredCases required_cases(double pi0, double a, double level, long long n) {
  check_level(level);
  const BetaPrior prior = prior_from_rate(pi0, a);
  const bool tied = n < 0;
  const long long y_max = tied ? kOpenSearchCap : n;
  for (long long y = 0; y <= y_max; ++y) {
    const long long trials =
        tied ? std::max<long long>(1, std::llround(static_cast<double>(y) / pi0)) : n;
    if (y > trials) continue;
    const CountRecord rec{"grid", "", 0, y, trials};
    if (is_reliable(beta_posterior(rec, prior), level)) return {true, y};
  }
  return {false, 0};
}

ReliabilityAssessment assess(const ConjugatePosterior& post, double level) {
  ReliabilityAssessment out;
  out.level_used = level;
  out.median = posterior_median(post);
  const auto [lo, hi] = equal_tailed_ci(post, level);
  out.ci_low = lo;
  out.ci_high = hi;
  out.relative_precision = relative_precision(post, level);
  out.reliable = out.relative_precision > 1.0;
  out.reliability_level = reliability_level(post);
  return out;
}

}  // namespace relmap
