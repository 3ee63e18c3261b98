#include "relmap/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relmap/errors.hpp"

namespace relmap {

namespace {

constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;
constexpr int kMaxIter = 1000;
constexpr double kCdfTol = 1e-10;

// Lentz continued fraction for the incomplete beta, valid for
// x < (a+1)/(a+b+2); the caller applies the symmetry relation otherwise.
double betacf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw numeric_error("incomplete beta continued fraction did not converge (a=" +
                      std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ++ap;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw numeric_error("incomplete gamma series did not converge (a=" + std::to_string(a) + ")");
}

double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw numeric_error("incomplete gamma continued fraction did not converge");
}

}  // namespace

double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw numeric_error("reg_inc_beta requires a,b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbt = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw numeric_error("reg_lower_gamma requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_cf(a, x);
}

double beta_quantile(double p, double a, double b) {
  if (!(p > 0.0) || !(p < 1.0)) throw numeric_error("beta_quantile requires p in (0,1)");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket exhausted at double precision
    const double f = reg_inc_beta(a, b, mid) - p;
    if (std::fabs(f) <= kCdfTol) return mid;
    if (f < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (std::fabs(reg_inc_beta(a, b, mid) - p) <= 1e-8) return mid;
  throw numeric_error("beta quantile bisection failed (a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ", p=" + std::to_string(p) + ")");
}

double gamma_quantile(double p, double shape, double rate) {
  if (!(p > 0.0) || !(p < 1.0)) throw numeric_error("gamma_quantile requires p in (0,1)");
  if (!(shape > 0.0) || !(rate > 0.0)) throw numeric_error("gamma_quantile requires shape, rate > 0");
  // bracket: expand upper bound until CDF(hi) >= p
  double hi = (shape + 10.0 * std::sqrt(shape) + 10.0) / rate;
  int guard = 0;
  while (reg_lower_gamma(shape, hi * rate) < p) {
    hi *= 2.0;
    if (++guard > 200) throw numeric_error("gamma quantile bracket expansion failed");
  }
  double lo = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double f = reg_lower_gamma(shape, mid * rate) - p;
    if (std::fabs(f) <= kCdfTol) return mid;
    if (f < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (std::fabs(reg_lower_gamma(shape, mid * rate) - p) <= 1e-8) return mid;
  throw numeric_error("gamma quantile bisection failed (shape=" + std::to_string(shape) + ")");
}

}  // namespace relmap
