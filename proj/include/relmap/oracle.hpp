#pragma once

#include <functional>

namespace relmap {

// Adaptive Simpson quadrature to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

struct TwoNodeMoments {
  double mean1 = 0.0;
  double mean2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
};

// Brute-force posterior moments of (pi_1, pi_2) for the two-region model:
// binomial likelihoods, logit-normal layer with flat intercept, pairwise
// CAR prior on one edge, sigma2/tau2 held fixed. The intercept and spatial
// effect integrate out analytically, leaving a 2-D density over the logits
// with Gaussian coupling of variance 2*sigma2 + tau2; moments come from
// nested adaptive quadrature. Independent of the sampler by construction.
// Requires 0 < y < n on both regions so the density is proper.
TwoNodeMoments quadrature_posterior_2node(long long y1, long long n1, long long y2,
                                          long long n2, double sigma2, double tau2,
                                          double tol = 1e-9);

struct OracleAssessment {
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double relative_precision = 0.0;
  bool reliable = false;
};

// Conjugate beta assessment through an independent code path: the CDF is
// computed by adaptive quadrature of the density under the substitution
// x = sin^2(theta) (smooth for shapes >= 1/2) and inverted by bisection.
// Cross-validates the incomplete-beta route. Requires y+a, n-y+b >= 1/2.
OracleAssessment exact_conjugate_oracle(long long y, long long n, double a, double b,
                                        double level);

}  // namespace relmap
