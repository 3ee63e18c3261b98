#include "relmap/informativeness.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "relmap/errors.hpp"
#include "relmap/posterior_summary.hpp"
#include "relmap/special_functions.hpp"

namespace relmap {

namespace {

double pooled_variance(const InfoInputs& in) {
  if (in.m < 1) throw validation_error("informativeness requires m >= 1");
  if (in.sigma2 < 0.0 || in.tau2 < 0.0) {
    throw validation_error("informativeness requires nonnegative variances");
  }
  const double v = in.sigma2 + (in.sigma2 + in.tau2) / in.m;
  if (!(v > 0.0)) {
    throw validation_error("informativeness undefined when both variances are zero");
  }
  return v;
}

}  // namespace

double a_hat_binomial(const InfoInputs& in) {
  const double v = pooled_variance(in);
  const double p = expit(in.linear_predictor);
  // (1 + e^L)/v computed as 1/((1-p) v) to stay finite for large L
  return 1.0 / ((1.0 - p) * v) - p;
}

double a_hat_poisson(const InfoInputs& in) {
  const double v = pooled_variance(in);
  return 1.0 / std::expm1(v);
}

A0Summary a0_posterior_summary(std::span<const double> beta0, std::span<const double> sigma2,
                               std::span<const double> tau2, int m0) {
  if (beta0.size() != sigma2.size() || beta0.size() != tau2.size() || beta0.empty()) {
    throw validation_error("a0_posterior_summary: draw arrays must be nonempty and equal length");
  }
  std::vector<double> a0(beta0.size());
  for (std::size_t d = 0; d < beta0.size(); ++d) {
    a0[d] = a_hat_binomial({beta0[d], sigma2[d], tau2[d], m0});
  }
  std::sort(a0.begin(), a0.end());
  return {quantile_type7(a0, 0.5), quantile_type7(a0, 0.025), quantile_type7(a0, 0.975)};
}

}  // namespace relmap
