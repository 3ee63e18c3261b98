#include "relmap/rng.hpp"

#include <cmath>
#include <numbers>

namespace relmap {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t chain_seed(std::uint64_t run_seed, std::string_view stratum, int year) {
  std::string key(stratum);
  key.push_back('\x1f');
  key += std::to_string(year);
  return run_seed ^ fnv1a64(key);
}

std::uint64_t stream_seed(std::uint64_t chain, std::string_view label) {
  return splitmix64(chain ^ fnv1a64(label));
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double rate) {
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

long long Rng::binomial(long long n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 64) {
    long long k = 0;
    for (long long i = 0; i < n; ++i) k += (uniform() < p) ? 1 : 0;
    return k;
  }
  // split at the median order statistic: W ~ Beta(a, n+1-a)
  const long long a = (n + 1) / 2;
  const double g1 = gamma(static_cast<double>(a), 1.0);
  const double g2 = gamma(static_cast<double>(n + 1 - a), 1.0);
  const double w = g1 / (g1 + g2);
  if (p >= w) return a + binomial(n - a, (p - w) / (1.0 - w));
  return binomial(a - 1, p / w);
}

}  // namespace relmap
