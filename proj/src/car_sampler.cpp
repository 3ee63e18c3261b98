#include "relmap/car_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relmap/errors.hpp"
#include "relmap/informativeness.hpp"
#include "relmap/special_functions.hpp"

namespace relmap {

namespace {

constexpr int kAdaptWindow = 100;
constexpr int kMaxRejections = 1000;
constexpr double kMaxStallRate = 0.5;
constexpr long long kStallCheckEvery = 5000;

}  // namespace

void ModelConfig::validate() const {
  if (total_iterations < 1) throw validation_error("total_iterations must be positive");
  if (burn_in < 0 || burn_in >= total_iterations) {
    throw validation_error("burn_in must satisfy 0 <= burn_in < total_iterations");
  }
  if (thin < 1) throw validation_error("thin must be >= 1");
  if (restriction_bound && !(*restriction_bound > 0.0)) {
    throw validation_error("restriction_bound must be positive");
  }
  if (baseline_m0 < 1) throw validation_error("baseline_m0 must be >= 1");
  if (!(proposal_sd_init > 0.0)) throw validation_error("proposal_sd_init must be positive");
  if (fix_sigma2 && !(*fix_sigma2 > 0.0)) throw validation_error("fix_sigma2 must be positive");
  if (fix_tau2 && !(*fix_tau2 > 0.0)) throw validation_error("fix_tau2 must be positive");
}

double AcceptanceStats::max_stall_rate() const {
  if (post_burn_scans == 0) return 0.0;
  const long long worst = std::max({stall_beta0, stall_sigma2, stall_tau2});
  return static_cast<double>(worst) / static_cast<double>(post_burn_scans);
}

CarChain::CarChain(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
                   const ModelConfig& cfg)
    : graph_(&graph), cfg_(cfg), global_rng_(stream_seed(cfg.seed, "global")) {
  cfg_.validate();
  const int I = graph.node_count();
  if (I < 2) throw validation_error("model fitting requires at least 2 regions");
  if (static_cast<int>(data.size()) != I) {
    throw validation_error("expected one record per graph node (" + std::to_string(I) +
                           "), got " + std::to_string(data.size()));
  }

  y_.assign(I, 0.0);
  n_.assign(I, 0.0);
  y_int_.assign(I, 0);
  n_int_.assign(I, 0);
  std::vector<bool> filled(I, false);
  for (const auto& rec : data) {
    rec.validate();
    const int i = graph.index_of(rec.region_id);
    if (i < 0) throw validation_error("record for unknown region " + rec.region_id);
    if (filled[i]) throw validation_error("duplicate record for region " + rec.region_id);
    filled[i] = true;
    y_[i] = static_cast<double>(rec.events);
    n_[i] = static_cast<double>(rec.trials);
    y_int_[i] = rec.events;
    n_int_[i] = rec.trials;
  }
  for (int i = 0; i < I; ++i) {
    if (!filled[i]) throw validation_error("missing record for region " + graph.node_ids()[i]);
  }
  stratum_ = data.front().stratum;
  year_ = data.front().year;
  for (const auto& rec : data) {
    if (rec.stratum != stratum_ || rec.year != year_) {
      throw validation_error("one chain fits one stratum-year cell; mixed keys in input");
    }
  }

  std::uint64_t h = fnv1a64("count-data");
  for (int i = 0; i < I; ++i) {
    h = splitmix64(h ^ fnv1a64(graph.node_ids()[i]));
    h = splitmix64(h ^ static_cast<std::uint64_t>(y_int_[i]));
    h = splitmix64(h ^ static_cast<std::uint64_t>(n_int_[i]));
  }
  data_hash_ = h;

  region_rng_.reserve(I);
  for (int i = 0; i < I; ++i) {
    region_rng_.emplace_back(stream_seed(cfg_.seed, graph.node_ids()[i]));
  }

  // start at crude logits, inside the typical set
  double sum_y = 0.0, sum_n = 0.0;
  for (int i = 0; i < I; ++i) {
    sum_y += y_[i];
    sum_n += n_[i];
  }
  state_.beta0 = logit((sum_y + 0.5) / (sum_n + 1.0));
  state_.z.assign(I, 0.0);
  state_.sigma2 = cfg_.fix_sigma2.value_or(0.1);
  state_.tau2 = cfg_.fix_tau2.value_or(0.1);
  state_.eta.assign(I, 0.0);
  for (int i = 0; i < I; ++i) {
    state_.eta[i] =
        n_int_[i] > 0 ? logit((y_[i] + 0.5) / (n_[i] + 1.0)) : state_.beta0;
  }
  if (cfg_.restriction_bound) {
    int guard = 0;
    while (a0_of(state_.beta0, state_.sigma2, state_.tau2) >= *cfg_.restriction_bound) {
      if (cfg_.fix_sigma2 && cfg_.fix_tau2) {
        throw validation_error("fixed variances violate the restriction bound");
      }
      if (!cfg_.fix_sigma2) state_.sigma2 *= 2.0;
      if (!cfg_.fix_tau2) state_.tau2 *= 2.0;
      if (++guard > 200) throw sampler_error("cannot find an initial state with a0 < bound");
    }
  }
  refresh_a0();

  loglik_.assign(I, 0.0);
  for (int i = 0; i < I; ++i) loglik_[i] = binomial_loglik(i, state_.eta[i]);
  proposal_sd_.assign(I, cfg_.proposal_sd_init);
  window_accepts_.assign(I, 0);
  post_accepts_.assign(I, 0);

  draws_.stratum = stratum_;
  draws_.year = year_;
  draws_.region_ids = graph.node_ids();
  draws_.events = y_int_;
  draws_.trials = n_int_;
  draws_.config = cfg_;
  draws_.graph_hash = graph.hash();
  draws_.data_hash = data_hash_;
  draws_.pi.assign(I, {});
  draws_.z.assign(I, {});
  for (int i = 0; i < I; ++i) {
    if (n_int_[i] == 0) draws_.zero_trial_regions.push_back(i);
  }
}

double CarChain::binomial_loglik(int i, double eta) const {
  if (n_int_[i] == 0) return 0.0;
  return y_[i] * eta - n_[i] * log1p_exp(eta);
}

double CarChain::a0_of(double beta0, double sigma2, double tau2) const {
  return a_hat_binomial({beta0, sigma2, tau2, cfg_.baseline_m0});
}

void CarChain::refresh_a0() {
  state_.a0_hat = a0_of(state_.beta0, state_.sigma2, state_.tau2);
}

void CarChain::update_eta() {
  const int I = graph_->node_count();
  for (int i = 0; i < I; ++i) {
    auto& rng = region_rng_[i];
    const double mu = state_.beta0 + state_.z[i];
    if (n_int_[i] == 0) {
      // no likelihood term: exact Gibbs draw from the hierarchy
      state_.eta[i] = mu + std::sqrt(state_.sigma2) * rng.normal();
      continue;
    }
    const double cur = state_.eta[i];
    const double prop = cur + proposal_sd_[i] * rng.normal();
    const double prop_ll = binomial_loglik(i, prop);
    const double dcur = cur - mu;
    const double dprop = prop - mu;
    const double log_accept =
        prop_ll - loglik_[i] - (dprop * dprop - dcur * dcur) / (2.0 * state_.sigma2);
    if (std::log(rng.uniform()) < log_accept) {
      state_.eta[i] = prop;
      loglik_[i] = prop_ll;
      ++window_accepts_[i];
      if (counting_post_) ++post_accepts_[i];
    }
  }
}

void CarChain::recenter_z() {
  const auto& comp = graph_->component_of();
  std::vector<double> sums(graph_->component_count(), 0.0);
  std::vector<int> sizes(graph_->component_count(), 0);
  for (int i = 0; i < graph_->node_count(); ++i) {
    sums[comp[i]] += state_.z[i];
    ++sizes[comp[i]];
  }
  for (int i = 0; i < graph_->node_count(); ++i) {
    state_.z[i] -= sums[comp[i]] / sizes[comp[i]];
  }
}

void CarChain::update_z() {
  const int I = graph_->node_count();
  for (int i = 0; i < I; ++i) {
    const int m = graph_->degree(i);
    if (m == 0) {
      state_.z[i] = 0.0;  // isolated node: effect pinned
      continue;
    }
    double nbr_sum = 0.0;
    for (int j : graph_->neighbors(i)) nbr_sum += state_.z[j];
    const double prior_prec = static_cast<double>(m) / state_.tau2;
    const double lik_prec = 1.0 / state_.sigma2;
    const double prec = prior_prec + lik_prec;
    const double mean =
        (prior_prec * (nbr_sum / m) + lik_prec * (state_.eta[i] - state_.beta0)) / prec;
    state_.z[i] = mean + region_rng_[i].normal() / std::sqrt(prec);
  }
  recenter_z();
}

void CarChain::update_beta0() {
  const int I = graph_->node_count();
  double mean_r = 0.0;
  for (int i = 0; i < I; ++i) mean_r += state_.eta[i] - state_.z[i];
  mean_r /= static_cast<double>(I);
  const double sd = std::sqrt(state_.sigma2 / static_cast<double>(I));
  if (!cfg_.restriction_bound) {
    state_.beta0 = mean_r + sd * global_rng_.normal();
    return;
  }
  const double bound = *cfg_.restriction_bound;
  for (int t = 0; t < kMaxRejections; ++t) {
    const double cand = mean_r + sd * global_rng_.normal();
    if (a0_of(cand, state_.sigma2, state_.tau2) < bound) {
      state_.beta0 = cand;
      return;
    }
  }
  if (counting_post_) ++stall_beta0_;
}

void CarChain::update_sigma2() {
  if (cfg_.fix_sigma2) return;
  const int I = graph_->node_count();
  double ss = 0.0;
  for (int i = 0; i < I; ++i) {
    const double r = state_.eta[i] - state_.beta0 - state_.z[i];
    ss += r * r;
  }
  const double shape = cfg_.sigma2_prior.shape + 0.5 * static_cast<double>(I);
  const double scale = cfg_.sigma2_prior.scale + 0.5 * ss;
  if (!cfg_.restriction_bound) {
    state_.sigma2 = global_rng_.inverse_gamma(shape, scale);
    return;
  }
  const double bound = *cfg_.restriction_bound;
  for (int t = 0; t < kMaxRejections; ++t) {
    const double cand = global_rng_.inverse_gamma(shape, scale);
    if (a0_of(state_.beta0, cand, state_.tau2) < bound) {
      state_.sigma2 = cand;
      return;
    }
  }
  if (counting_post_) ++stall_sigma2_;
}

void CarChain::update_tau2() {
  if (cfg_.fix_tau2) return;
  const double quad = icar_quadratic(state_.z, *graph_);
  const double shape = cfg_.tau2_prior.shape + 0.5 * static_cast<double>(graph_->icar_rank());
  const double scale = cfg_.tau2_prior.scale + 0.5 * quad;
  if (!cfg_.restriction_bound) {
    state_.tau2 = global_rng_.inverse_gamma(shape, scale);
    return;
  }
  const double bound = *cfg_.restriction_bound;
  for (int t = 0; t < kMaxRejections; ++t) {
    const double cand = global_rng_.inverse_gamma(shape, scale);
    if (a0_of(state_.beta0, state_.sigma2, cand) < bound) {
      state_.tau2 = cand;
      return;
    }
  }
  if (counting_post_) ++stall_tau2_;
}

void CarChain::step() {
  update_eta();
  update_z();
  update_beta0();
  update_sigma2();
  update_tau2();
  refresh_a0();
  if (counting_post_) ++post_scans_;
}

void CarChain::adapt_proposals(std::span<const double> window_acceptance) {
  if (burn_in_done_) return;  // kernel frozen once burn-in completes
  if (static_cast<int>(window_acceptance.size()) != graph_->node_count()) {
    throw validation_error("adapt_proposals: acceptance vector length mismatch");
  }
  for (int i = 0; i < graph_->node_count(); ++i) {
    const double rate = window_acceptance[i];
    if (rate >= 0.3 && rate <= 0.5) continue;
    proposal_sd_[i] = std::clamp(proposal_sd_[i] * std::exp(rate - 0.4), 1e-3, 20.0);
  }
}

void CarChain::check_finite() const {
  const bool ok = std::isfinite(state_.beta0) && std::isfinite(state_.sigma2) &&
                  std::isfinite(state_.tau2) && state_.sigma2 > 0.0 && state_.tau2 > 0.0 &&
                  std::all_of(state_.eta.begin(), state_.eta.end(),
                              [](double v) { return std::isfinite(v); });
  if (!ok) {
    throw sampler_error("non-finite sampler state (stratum " + stratum_ + ", year " +
                        std::to_string(year_) + ")");
  }
}

void CarChain::check_stall_rate(bool final_check) const {
  if (post_scans_ < (final_check ? 200 : kStallCheckEvery)) return;
  AcceptanceStats s;
  s.stall_beta0 = stall_beta0_;
  s.stall_sigma2 = stall_sigma2_;
  s.stall_tau2 = stall_tau2_;
  s.post_burn_scans = post_scans_;
  if (s.max_stall_rate() > kMaxStallRate) {
    throw sampler_error("constraint rejection stalled on more than half of post-burn-in scans "
                        "(stratum " + stratum_ + ", year " + std::to_string(year_) +
                        "); the bound leaves almost no posterior mass");
  }
}

void CarChain::run_burn_in() {
  std::fill(window_accepts_.begin(), window_accepts_.end(), 0);
  std::vector<double> rates(graph_->node_count(), 0.0);
  for (long long iter = 1; iter <= cfg_.burn_in; ++iter) {
    step();
    if (iter % kAdaptWindow == 0) {
      for (int i = 0; i < graph_->node_count(); ++i) {
        rates[i] = static_cast<double>(window_accepts_[i]) / kAdaptWindow;
      }
      adapt_proposals(rates);
      std::fill(window_accepts_.begin(), window_accepts_.end(), 0);
    }
    if (iter % 1000 == 0) check_finite();
  }
  burn_in_done_ = true;
  counting_post_ = true;
}

void CarChain::run_sampling() {
  const int I = graph_->node_count();
  const long long post = cfg_.total_iterations - cfg_.burn_in;
  const long long expected = cfg_.retained_draws();
  for (int i = 0; i < I; ++i) {
    draws_.pi[i].reserve(expected);
    draws_.z[i].reserve(expected);
  }
  draws_.beta0.reserve(expected);
  draws_.sigma2.reserve(expected);
  draws_.tau2.reserve(expected);
  draws_.a0_hat.reserve(expected);

  for (long long iter = 1; iter <= post; ++iter) {
    step();
    if (iter % cfg_.thin == 0) {
      for (int i = 0; i < I; ++i) {
        draws_.pi[i].push_back(expit(state_.eta[i]));
        draws_.z[i].push_back(state_.z[i]);
      }
      draws_.beta0.push_back(state_.beta0);
      draws_.sigma2.push_back(state_.sigma2);
      draws_.tau2.push_back(state_.tau2);
      draws_.a0_hat.push_back(state_.a0_hat);
      check_finite();
    }
    if (iter % kStallCheckEvery == 0) check_stall_rate(false);
  }
  check_stall_rate(true);
  draws_.draw_count = static_cast<long long>(draws_.beta0.size());

  auto& acc = draws_.accept;
  acc.eta_acceptance.assign(I, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < I; ++i) {
    if (n_int_[i] > 0 && post_scans_ > 0) {
      acc.eta_acceptance[i] =
          static_cast<double>(post_accepts_[i]) / static_cast<double>(post_scans_);
    }
  }
  acc.proposal_sd.assign(proposal_sd_.begin(), proposal_sd_.end());
  acc.stall_beta0 = stall_beta0_;
  acc.stall_sigma2 = stall_sigma2_;
  acc.stall_tau2 = stall_tau2_;
  acc.post_burn_scans = post_scans_;
}

void CarChain::set_state(ChainState s) {
  const int I = graph_->node_count();
  if (static_cast<int>(s.eta.size()) != I || static_cast<int>(s.z.size()) != I) {
    throw validation_error("set_state: vector length mismatch");
  }
  if (!(s.sigma2 > 0.0) || !(s.tau2 > 0.0)) {
    throw validation_error("set_state: variances must be positive");
  }
  state_ = std::move(s);
  refresh_a0();
  for (int i = 0; i < I; ++i) loglik_[i] = binomial_loglik(i, state_.eta[i]);
}

PosteriorDraws CarChain::take_draws() { return std::move(draws_); }

PosteriorDraws fit_standard(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
                            const ModelConfig& cfg) {
  if (cfg.restriction_bound) {
    throw validation_error("fit_standard requires restriction_bound unset; use fit_restricted");
  }
  CarChain chain(data, graph, cfg);
  chain.run_burn_in();
  chain.run_sampling();
  return chain.take_draws();
}

PosteriorDraws fit_restricted(const std::vector<CountRecord>& data, const AdjacencyGraph& graph,
                              const ModelConfig& cfg) {
  if (!cfg.restriction_bound) {
    throw validation_error("fit_restricted requires a restriction_bound");
  }
  CarChain chain(data, graph, cfg);
  chain.run_burn_in();
  chain.run_sampling();
  return chain.take_draws();
}

}  // namespace relmap
