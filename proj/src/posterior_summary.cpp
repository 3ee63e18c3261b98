#include "relmap/posterior_summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relmap/errors.hpp"

namespace relmap {

namespace {

constexpr double kLevelFloor = 0.001;
constexpr double kLevelCeil = 0.999;
constexpr double kLevelTol = 1e-4;

double empirical_rp(std::span<const double> sorted, double level) {
  const double alpha = 1.0 - level;
  const double lo = quantile_type7(sorted, alpha / 2.0);
  const double hi = quantile_type7(sorted, 1.0 - alpha / 2.0);
  const double m = quantile_type7(sorted, 0.5);
  const double width = hi - lo;
  if (width <= 0.0) return std::numeric_limits<double>::infinity();
  return std::min(m, 1.0 - m) / width;
}

}  // namespace

std::string to_string(AssessmentFlag f) {
  switch (f) {
    case AssessmentFlag::low_sample: return "low_sample";
    case AssessmentFlag::degenerate: return "degenerate";
    default: return "";
  }
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw validation_error("quantile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

RegionAssessment assess_region(const SampleSet& s, double level) {
  if (s.draws.empty()) throw validation_error("assess_region: empty sample set");
  if (!(level > 0.0) || !(level < 1.0)) {
    throw validation_error("assess_region: level must lie in (0,1)");
  }
  std::vector<double> sorted = s.draws;
  std::sort(sorted.begin(), sorted.end());

  RegionAssessment out;
  if (sorted.size() < kLowSampleCount) out.flag = AssessmentFlag::low_sample;

  auto& a = out.assessment;
  a.level_used = level;
  a.median = quantile_type7(sorted, 0.5);
  const double alpha = 1.0 - level;
  a.ci_low = quantile_type7(sorted, alpha / 2.0);
  a.ci_high = quantile_type7(sorted, 1.0 - alpha / 2.0);
  a.relative_precision = empirical_rp(sorted, level);
  a.reliable = a.relative_precision > 1.0;

  if (std::isinf(a.relative_precision)) {
    out.flag = AssessmentFlag::degenerate;
    a.reliability_level = kLevelCeil;
    return out;
  }

  if (empirical_rp(sorted, kLevelCeil) > 1.0) {
    a.reliability_level = kLevelCeil;
  } else if (empirical_rp(sorted, kLevelFloor) <= 1.0) {
    a.reliability_level = kLevelFloor;
  } else {
    double lo = kLevelFloor, hi = kLevelCeil;
    while (hi - lo > kLevelTol) {
      const double mid = 0.5 * (lo + hi);
      if (empirical_rp(sorted, mid) > 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    a.reliability_level = 0.5 * (lo + hi);
  }
  return out;
}

std::vector<ComparisonRow> comparison_table(const std::vector<LabeledAssessment>& standard,
                                            const std::vector<LabeledAssessment>& restricted) {
  if (standard.size() != restricted.size()) {
    throw validation_error("comparison_table: region sets differ in size");
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(standard.size());
  for (std::size_t i = 0; i < standard.size(); ++i) {
    const auto& s = standard[i];
    const auto& r = restricted[i];
    if (s.region_id != r.region_id) {
      throw validation_error("comparison_table: region mismatch at row " + std::to_string(i) +
                             " (" + s.region_id + " vs " + r.region_id + ")");
    }
    ComparisonRow row;
    row.region_id = s.region_id;
    row.events = s.events;
    row.trials = s.trials;
    row.crude_rate = s.trials > 0 ? static_cast<double>(s.events) / s.trials : 0.0;
    row.median_standard = s.result.assessment.median;
    row.median_restricted = r.result.assessment.median;
    row.rp_standard = s.result.assessment.relative_precision;
    row.rp_restricted = r.result.assessment.relative_precision;
    row.level_standard = s.result.assessment.reliability_level;
    row.level_restricted = r.result.assessment.reliability_level;
    row.reliable_standard = s.result.assessment.reliable;
    row.reliable_restricted = r.result.assessment.reliable;
    rows.push_back(std::move(row));
  }
  return rows;
}

double effective_sample_size(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = lag; t < n; ++t) s += (draws[t] - mean) * (draws[t - lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  // Geyer: sum paired autocorrelations while pairs stay positive and monotone
  double sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n; k += 2) {
    const double pair = (autocov(k) + autocov(k + 1)) / c0;
    if (pair <= 0.0) break;
    sum += std::min(pair, prev_pair);
    prev_pair = pair;
  }
  const double ess = static_cast<double>(n) / (1.0 + 2.0 * sum);
  return std::min(ess, static_cast<double>(n));
}

double split_rhat(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 8) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t half = n / 2;
  auto stats = [&](std::size_t begin, std::size_t count) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) m += draws[begin + i];
    m /= static_cast<double>(count);
    double v = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = draws[begin + i] - m;
      v += d * d;
    }
    return std::pair{m, v / static_cast<double>(count - 1)};
  };
  const auto [m1, v1] = stats(0, half);
  const auto [m2, v2] = stats(n - half, half);
  const double w = 0.5 * (v1 + v2);
  if (!(w > 0.0)) return 1.0;
  const double mbar = 0.5 * (m1 + m2);
  const double b = static_cast<double>(half) *
                   ((m1 - mbar) * (m1 - mbar) + (m2 - mbar) * (m2 - mbar));
  const double var_plus =
      (static_cast<double>(half) - 1.0) / static_cast<double>(half) * w + b / static_cast<double>(half);
  return std::sqrt(var_plus / w);
}

}  // namespace relmap
