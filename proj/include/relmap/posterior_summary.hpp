#pragma once

#include <span>
#include <string>
#include <vector>

#include "relmap/reliability.hpp"

namespace relmap {

// Retained MCMC draws of one region's rate.
struct SampleSet {
  std::vector<double> draws;  // values in (0,1)
};

enum class AssessmentFlag { none, low_sample, degenerate };

std::string to_string(AssessmentFlag f);

// Fewer retained draws than this earns a low-sample flag.
inline constexpr std::size_t kLowSampleCount = 1000;

struct RegionAssessment {
  ReliabilityAssessment assessment;
  AssessmentFlag flag = AssessmentFlag::none;
};

// Quantile estimator fixed to type-7 linear interpolation for
// cross-language reproducibility. Input must be sorted ascending.
double quantile_type7(std::span<const double> sorted, double p);

// Empirical analog of the conjugate assessment: median and equal-tailed
// quantiles of the draws; relative precision min(m, 1-m)/width; reliability
// level by bisection on the empirical quantiles. Zero-width draws are
// flagged degenerate with relative precision +inf.
RegionAssessment assess_region(const SampleSet& s, double level);

struct ComparisonRow {
  std::string region_id;
  long long events = 0;
  long long trials = 0;
  double crude_rate = 0.0;
  double median_standard = 0.0;
  double median_restricted = 0.0;
  double rp_standard = 0.0;
  double rp_restricted = 0.0;
  double level_standard = 0.0;
  double level_restricted = 0.0;
  bool reliable_standard = false;
  bool reliable_restricted = false;
};

struct LabeledAssessment {
  std::string region_id;
  long long events = 0;
  long long trials = 0;
  RegionAssessment result;
};

// Side-by-side rows for matched region sets (standard vs restricted fit).
std::vector<ComparisonRow> comparison_table(const std::vector<LabeledAssessment>& standard,
                                            const std::vector<LabeledAssessment>& restricted);

// Effective sample size by Geyer's initial monotone positive sequence.
double effective_sample_size(std::span<const double> draws);

// Potential scale reduction from the two halves of a single chain.
double split_rhat(std::span<const double> draws);

}  // namespace relmap
