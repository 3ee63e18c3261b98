#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relmap/adjacency_graph.hpp"
#include "relmap/count_data.hpp"
#include "relmap/posterior_summary.hpp"
#include "relmap/rng.hpp"

namespace relmap {

// Inverse-gamma with density ∝ x^{-shape-1} e^{-scale/x}. Note the scale
// convention: IG(1, 1/100) here means scale = 0.01, mode = 1/200. Stated
// explicitly because the 1/100-vs-100 conventions differ across packages.
struct InverseGammaPrior {
  double shape = 1.0;
  double scale = 1.0;
};

struct ModelConfig {
  long long total_iterations = 100000;
  long long burn_in = 50000;
  long long thin = 10;
  std::uint64_t seed = 0;
  InverseGammaPrior sigma2_prior{1.0, 1.0 / 100.0};
  InverseGammaPrior tau2_prior{1.0, 1.0 / 7.0};
  std::optional<double> restriction_bound;  // A: keep a0 < A in every draw
  int baseline_m0 = 3;
  double proposal_sd_init = 0.5;
  // Degenerate priors pinning a variance component (used by oracles/tests).
  std::optional<double> fix_sigma2;
  std::optional<double> fix_tau2;

  void validate() const;
  long long retained_draws() const { return (total_iterations - burn_in) / thin; }
};

struct ChainState {
  std::vector<double> eta;  // logit rate per region, canonical graph order
  std::vector<double> z;    // spatial effects, sum-to-zero per component
  double beta0 = 0.0;
  double sigma2 = 0.1;
  double tau2 = 0.1;
  double a0_hat = 0.0;      // informativeness at (beta0, baseline_m0)
};

struct AcceptanceStats {
  std::vector<double> eta_acceptance;  // post-burn-in rate per region; NaN if no trials
  std::vector<double> proposal_sd;     // frozen at end of burn-in
  long long stall_beta0 = 0;           // post-burn-in constraint stalls
  long long stall_sigma2 = 0;
  long long stall_tau2 = 0;
  long long post_burn_scans = 0;

  double max_stall_rate() const;
};

// Thinned posterior sample for one stratum-year chain plus the metadata
// needed to reproduce it.
struct PosteriorDraws {
  std::string stratum;
  int year = 0;
  std::vector<std::string> region_ids;  // canonical graph order
  std::vector<long long> events;
  std::vector<long long> trials;
  ModelConfig config;
  std::uint64_t graph_hash = 0;
  std::uint64_t data_hash = 0;

  long long draw_count = 0;
  std::vector<std::vector<double>> pi;  // [region][draw]
  std::vector<std::vector<double>> z;   // [region][draw]
  std::vector<double> beta0;
  std::vector<double> sigma2;
  std::vector<double> tau2;
  std::vector<double> a0_hat;

  AcceptanceStats accept;
  std::vector<int> zero_trial_regions;

  SampleSet pi_samples(int region_index) const { return {pi.at(region_index)}; }
};

// Metropolis-within-Gibbs chain for the binomial-logit intrinsic-CAR model.
// One scan is: per-region Metropolis on eta; Gibbs on each z then re-center
// to sum-to-zero per component; Gibbs on beta0 (flat prior); inverse-gamma
// Gibbs on sigma2 and tau2. With a restriction bound A, the beta0/sigma2/
// tau2 conditionals are truncated to {a0 < A} by rejection; 1000 consecutive
// rejections keep the previous value and count a stall.
//
// Each region draws from its own RNG stream keyed by region id, and global
// parameters from a separate stream, so results are independent of input
// record order. Deterministic given (data, graph, config).
class CarChain {
 public:
  CarChain(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
           const ModelConfig& cfg);

  void update_eta();
  void update_z();
  void update_beta0();
  void update_sigma2();
  void update_tau2();
  void step();  // one full scan in the order above

  // Rescale per-region proposal sds toward acceptance in [0.3, 0.5].
  // Called during burn-in only; scales are frozen afterwards.
  void adapt_proposals(std::span<const double> window_acceptance);

  void run_burn_in();
  void run_sampling();

  const ChainState& state() const { return state_; }
  void set_state(ChainState s);  // for tests and warm restarts
  std::span<const double> proposal_sds() const { return proposal_sd_; }
  const AdjacencyGraph& graph() const { return *graph_; }

  PosteriorDraws take_draws();

 private:
  double binomial_loglik(int i, double eta) const;
  double a0_of(double beta0, double sigma2, double tau2) const;
  void refresh_a0();
  void check_finite() const;
  void check_stall_rate(bool final_check) const;
  void recenter_z();

  const AdjacencyGraph* graph_;
  ModelConfig cfg_;
  std::string stratum_;
  int year_ = 0;
  std::vector<double> y_;
  std::vector<double> n_;
  std::vector<long long> y_int_;
  std::vector<long long> n_int_;
  std::uint64_t data_hash_ = 0;

  ChainState state_;
  std::vector<double> loglik_;  // cached binomial log-likelihood at eta
  std::vector<double> proposal_sd_;
  std::vector<Rng> region_rng_;
  Rng global_rng_;

  // adaptation window (burn-in) and post-burn-in acceptance bookkeeping
  std::vector<long long> window_accepts_;
  std::vector<long long> post_accepts_;
  bool counting_post_ = false;
  long long post_scans_ = 0;
  long long stall_beta0_ = 0, stall_sigma2_ = 0, stall_tau2_ = 0;
  bool burn_in_done_ = false;

  PosteriorDraws draws_;
};

// One stratum-year fit of the unrestricted model (restriction_bound must be
// unset).
PosteriorDraws fit_standard(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
                            const ModelConfig& cfg);

// Same update cycle with the (beta0, sigma2, tau2) conditionals truncated to
// {a0 < A}; every retained draw satisfies the bound.
PosteriorDraws fit_restricted(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
                              const ModelConfig& cfg);

}  // namespace relmap
