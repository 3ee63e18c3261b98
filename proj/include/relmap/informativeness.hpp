#pragma once

#include <span>

namespace relmap {

// Inputs to the prior-informativeness approximations: the linear predictor
// (intercept-only models pass beta0), the two variance components, and a
// neighbor count (a region's own m_i, or the baseline m0).
struct InfoInputs {
  double linear_predictor = 0.0;
  double sigma2 = 0.0;
  double tau2 = 0.0;
  int m = 3;
};

// Equivalent prior cases contributed by the binomial-logit CAR model:
//   (1 + e^L) / (sigma2 + (sigma2 + tau2)/m) - e^L / (1 + e^L).
// The baseline value a0 is this evaluated at (x0'beta, m0). Can be negative
// for very diffuse models; callers treat the bound a0 < A as one-sided.
double a_hat_binomial(const InfoInputs& in);

// Poisson analog: 1 / (exp(sigma2 + (sigma2 + tau2)/m) - 1).
double a_hat_poisson(const InfoInputs& in);

struct A0Summary {
  double median = 0.0;
  double lo = 0.0;   // 2.5% quantile
  double hi = 0.0;   // 97.5% quantile
};

// a0 recomputed per retained draw at baseline m0, summarized by its median
// and central 95% interval.
A0Summary a0_posterior_summary(std::span<const double> beta0, std::span<const double> sigma2,
                               std::span<const double> tau2, int m0);

}  // namespace relmap
