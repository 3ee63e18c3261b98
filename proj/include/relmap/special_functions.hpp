#pragma once

namespace relmap {

// inverse logit, stable in both tails
double expit(double x);

double logit(double p);

// log(1 + e^x) without overflow
double log1p_exp(double x);

double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b) by continued fraction (Lentz).
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a,x), series/continued fraction.
double reg_lower_gamma(double a, double x);

// Quantiles by bracketed bisection on the CDF, stopping at |CDF - p| <= 1e-10.
// Throws numeric_error if the bracket collapses before reaching tolerance.
double beta_quantile(double p, double a, double b);
double gamma_quantile(double p, double shape, double rate);

}  // namespace relmap
