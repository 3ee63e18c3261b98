#include "relmap/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relmap/errors.hpp"
#include "relmap/special_functions.hpp"

namespace relmap {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw numeric_error("adaptive quadrature recursion limit reached");
  }
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

TwoNodeMoments quadrature_posterior_2node(long long y1, long long n1, long long y2,
                                          long long n2, double sigma2, double tau2,
                                          double tol) {
  if (y1 <= 0 || y1 >= n1 || y2 <= 0 || y2 >= n2) {
    throw validation_error("two-node oracle requires 0 < y < n in both regions");
  }
  if (!(sigma2 > 0.0) || !(tau2 > 0.0)) {
    throw validation_error("two-node oracle requires positive variances");
  }
  // After integrating the flat intercept and the sum-to-zero spatial effect
  // out of the hierarchy, the coupling of the two logits is Gaussian with
  // variance 2*sigma2 + tau2.
  const double v = 2.0 * sigma2 + tau2;
  const double y1d = static_cast<double>(y1), n1d = static_cast<double>(n1);
  const double y2d = static_cast<double>(y2), n2d = static_cast<double>(n2);

  const double c1 = logit((y1d + 0.5) / (n1d + 1.0));
  const double c2 = logit((y2d + 0.5) / (n2d + 1.0));
  const double p1 = (y1d + 0.5) / (n1d + 1.0);
  const double p2 = (y2d + 0.5) / (n2d + 1.0);
  const double f1 = n1d * p1 * (1.0 - p1) + 1.0 / v;
  const double f2 = n2d * p2 * (1.0 - p2) + 1.0 / v;
  const double w1 = 18.0 / std::sqrt(f1) + 4.0;
  const double w2 = 18.0 / std::sqrt(f2) + 4.0;

  const double log_peak = y1d * c1 - n1d * log1p_exp(c1) + y2d * c2 - n2d * log1p_exp(c2);
  auto log_density = [&](double e1, double e2) {
    const double d = e1 - e2;
    return y1d * e1 - n1d * log1p_exp(e1) + y2d * e2 - n2d * log1p_exp(e2) -
           d * d / (2.0 * v) - log_peak;
  };

  // Laplace-scale estimate of the normalizer fixes the absolute tolerance.
  const double scale = 2.0 * std::numbers::pi / std::sqrt(f1 * f2);
  const double tol2d = tol * scale;

  auto integral = [&](const std::function<double(double, double)>& g) {
    auto outer = [&](double e1) {
      auto inner = [&](double e2) { return g(e1, e2) * std::exp(log_density(e1, e2)); };
      return integrate(inner, c2 - w2, c2 + w2, tol2d / (4.0 * 2.0 * w1));
    };
    return integrate(outer, c1 - w1, c1 + w1, tol2d / 4.0);
  };

  const double z = integral([](double, double) { return 1.0; });
  const double m1 = integral([](double e1, double) { return expit(e1); }) / z;
  const double m2 = integral([](double, double e2) { return expit(e2); }) / z;
  const double s1 = integral([](double e1, double) {
                      const double p = expit(e1);
                      return p * p;
                    }) / z;
  const double s2 = integral([](double, double e2) {
                      const double p = expit(e2);
                      return p * p;
                    }) / z;
  return {m1, m2, s1 - m1 * m1, s2 - m2 * m2};
}

OracleAssessment exact_conjugate_oracle(long long y, long long n, double a, double b,
                                        double level) {
  const double s1 = static_cast<double>(y) + a;
  const double s2 = static_cast<double>(n - y) + b;
  if (!(s1 >= 0.5) || !(s2 >= 0.5)) {
    throw validation_error("conjugate oracle requires posterior shapes >= 1/2");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw validation_error("conjugate oracle requires level in (0,1)");
  }
  // Beta CDF by quadrature of the density under x = sin^2(theta); both
  // exponents 2*shape - 1 are nonnegative, so the integrand is smooth.
  const double lb = log_beta(s1, s2);
  auto theta_density = [&](double t) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    double le = std::numbers::ln2 - lb;
    const double es = 2.0 * s1 - 1.0;
    const double ec = 2.0 * s2 - 1.0;
    if (es != 0.0) {
      if (s <= 0.0) return 0.0;
      le += es * std::log(s);
    }
    if (ec != 0.0) {
      if (c <= 0.0) return 0.0;
      le += ec * std::log(c);
    }
    return std::exp(le);
  };
  auto cdf = [&](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return integrate(theta_density, 0.0, std::asin(std::sqrt(x)), 1e-12);
  };
  auto quantile = [&](double p) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double f = cdf(mid) - p;
      if (std::fabs(f) <= 1e-9) return mid;
      if (f < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double mid = 0.5 * (lo + hi);
    if (std::fabs(cdf(mid) - p) <= 1e-7) return mid;
    throw numeric_error("oracle quantile bisection failed (p=" + std::to_string(p) + ")");
  };

  OracleAssessment out;
  const double alpha = 1.0 - level;
  out.median = quantile(0.5);
  out.ci_low = quantile(alpha / 2.0);
  out.ci_high = quantile(1.0 - alpha / 2.0);
  const double width = out.ci_high - out.ci_low;
  if (!(width > 0.0)) throw numeric_error("oracle: zero-width interval");
  out.relative_precision = std::min(out.median, 1.0 - out.median) / width;
  out.reliable = out.relative_precision > 1.0;
  return out;
}

}  // namespace relmap
