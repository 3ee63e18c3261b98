#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace relmap {

// FNV-1a 64-bit hash, used to derive per-chain and per-region seeds from ids.
std::uint64_t fnv1a64(std::string_view s);

// splitmix64 finalizer; decorrelates seeds that differ in few bits.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for one stratum-year chain: run_seed XOR hash("stratum\x1fyear").
std::uint64_t chain_seed(std::uint64_t run_seed, std::string_view stratum, int year);

// Seed for a named sub-stream of a chain (region id or "global").
std::uint64_t stream_seed(std::uint64_t chain, std::string_view label);

// Random stream with self-contained variate generators. The std::<random>
// distributions are implementation-defined, so draws are produced here
// directly from the mt19937_64 bit stream to keep runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // uniform on (0,1); never returns 0 or 1
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; consumes exactly two uniforms
  double normal();

  // Gamma(shape, rate) by Marsaglia-Tsang squeeze
  double gamma(double shape, double rate);

  // InverseGamma(shape, scale), density ∝ x^{-shape-1} e^{-scale/x}
  double inverse_gamma(double shape, double scale) {
    return 1.0 / gamma(shape, scale);
  }

  // exact Binomial(n, p) draw; O(log n) via beta splitting
  long long binomial(long long n, double p);

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace relmap
