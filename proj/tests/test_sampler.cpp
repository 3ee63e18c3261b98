#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relmap/car_sampler.hpp"
#include "relmap/errors.hpp"
#include "relmap/informativeness.hpp"
#include "relmap/oracle.hpp"
#include "relmap/special_functions.hpp"

using namespace relmap;

namespace {

AdjacencyGraph path_graph(int n) {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) nodes.push_back("r" + std::to_string(100 + i));
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(nodes[i], nodes[i + 1]);
  return AdjacencyGraph::build(edges, nodes);
}

std::vector<CountRecord> records_for(const AdjacencyGraph& g, const std::vector<long long>& y,
                                     const std::vector<long long>& n) {
  std::vector<CountRecord> out;
  for (int i = 0; i < g.node_count(); ++i) {
    out.push_back({g.node_ids()[i], "s", 2019, y[i], n[i]});
  }
  return out;
}

ModelConfig quick_config(std::uint64_t seed, long long iters = 4000, long long burn = 2000,
                         long long thin = 2) {
  ModelConfig cfg;
  cfg.total_iterations = iters;
  cfg.burn_in = burn;
  cfg.thin = thin;
  cfg.seed = seed;
  return cfg;
}

// one-sample Kolmogorov-Smirnov statistic against a CDF
template <typename Cdf>
double ks_statistic(std::vector<double> draws, Cdf cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("config validation") {
  ModelConfig cfg;
  cfg.burn_in = cfg.total_iterations;
  CHECK_THROWS_AS(cfg.validate(), validation_error);
  cfg = ModelConfig{};
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), validation_error);
  cfg = ModelConfig{};
  cfg.restriction_bound = -1.0;
  CHECK_THROWS_AS(cfg.validate(), validation_error);
  CHECK(ModelConfig{}.retained_draws() == 5000);
}

TEST_CASE("model routing guards") {
  const auto g = path_graph(4);
  const auto data = records_for(g, {1, 2, 3, 4}, {20, 20, 20, 20});
  ModelConfig cfg = quick_config(1, 400, 200, 1);
  cfg.restriction_bound = 5.0;
  CHECK_THROWS_AS(fit_standard(data, g, cfg), validation_error);
  cfg.restriction_bound.reset();
  CHECK_THROWS_AS(fit_restricted(data, g, cfg), validation_error);
}

TEST_CASE("input validation") {
  const auto g = path_graph(3);
  ModelConfig cfg = quick_config(1, 400, 200, 1);
  auto data = records_for(g, {1, 2, 3}, {20, 20, 20});
  data.pop_back();
  CHECK_THROWS_AS(fit_standard(data, g, cfg), validation_error);  // missing region
  data = records_for(g, {1, 2, 3}, {20, 20, 20});
  data[2].region_id = data[0].region_id;
  CHECK_THROWS_AS(fit_standard(data, g, cfg), validation_error);  // duplicate
  data = records_for(g, {1, 2, 3}, {20, 20, 20});
  data[1].year = 2001;
  CHECK_THROWS_AS(fit_standard(data, g, cfg), validation_error);  // mixed cells
}

TEST_CASE("determinism: identical inputs give bit-identical draws") {
  const auto g = path_graph(5);
  const auto data = records_for(g, {2, 5, 1, 8, 3}, {40, 60, 25, 90, 33});
  const auto d1 = fit_standard(data, g, quick_config(77));
  const auto d2 = fit_standard(data, g, quick_config(77));
  CHECK(d1.draw_count == d2.draw_count);
  CHECK(d1.beta0 == d2.beta0);
  CHECK(d1.sigma2 == d2.sigma2);
  CHECK(d1.tau2 == d2.tau2);
  for (int i = 0; i < 5; ++i) CHECK(d1.pi[i] == d2.pi[i]);

  const auto d3 = fit_standard(data, g, quick_config(78));
  CHECK(d1.beta0 != d3.beta0);
}

TEST_CASE("exchangeability: permuting record order changes nothing") {
  const auto g = path_graph(5);
  auto data = records_for(g, {2, 5, 1, 8, 3}, {40, 60, 25, 90, 33});
  const auto d1 = fit_standard(data, g, quick_config(123));
  std::shuffle(data.begin(), data.end(), std::mt19937{99});
  const auto d2 = fit_standard(data, g, quick_config(123));
  for (int i = 0; i < 5; ++i) CHECK(d1.pi[i] == d2.pi[i]);
  CHECK(d1.data_hash == d2.data_hash);
}

TEST_CASE("sum-to-zero holds in every retained draw") {
  // two components: a 4-path and a 3-path
  std::vector<std::string> nodes{"a", "b", "c", "d", "p", "q", "r"};
  std::vector<std::pair<std::string, std::string>> edges{
      {"a", "b"}, {"b", "c"}, {"c", "d"}, {"p", "q"}, {"q", "r"}};
  const auto g = AdjacencyGraph::build(edges, nodes);
  CHECK(g.component_count() == 2);
  std::vector<CountRecord> data;
  for (int i = 0; i < 7; ++i) data.push_back({g.node_ids()[i], "s", 2019, i, 30});
  const auto draws = fit_standard(data, g, quick_config(5, 2000, 1000, 2));
  const auto& comp = g.component_of();
  for (long long d = 0; d < draws.draw_count; ++d) {
    std::vector<double> sums(g.component_count(), 0.0);
    for (int i = 0; i < 7; ++i) sums[comp[i]] += draws.z[i][d];
    for (double s : sums) CHECK(std::fabs(s) < 1e-8);
  }
}

TEST_CASE("variance updates match their analytic conditionals") {
  const auto g = path_graph(5);
  const auto data = records_for(g, {3, 6, 2, 9, 4}, {50, 50, 50, 50, 50});
  ModelConfig cfg = quick_config(31);
  CarChain chain(data, g, cfg);

  // freeze eta, z, beta0 at a fixed state
  ChainState st = chain.state();
  st.eta = {-2.0, -1.5, -2.5, -1.0, -2.2};
  st.z = {0.3, -0.1, 0.2, -0.3, -0.1};
  st.beta0 = -1.8;
  st.sigma2 = 0.2;
  st.tau2 = 0.4;
  chain.set_state(st);

  const int I = 5;
  double ss = 0.0;
  for (int i = 0; i < I; ++i) {
    const double r = st.eta[i] - st.beta0 - st.z[i];
    ss += r * r;
  }
  const double sig_shape = 1.0 + 0.5 * I;
  const double sig_scale = 0.01 + 0.5 * ss;
  const double quad = icar_quadratic(st.z, g);
  const double tau_shape = 1.0 + 0.5 * g.icar_rank();
  const double tau_scale = 1.0 / 7.0 + 0.5 * quad;

  const int n_draws = 100000;
  std::vector<double> sig_draws, tau_draws;
  sig_draws.reserve(n_draws);
  tau_draws.reserve(n_draws);
  for (int t = 0; t < n_draws; ++t) {
    chain.update_sigma2();
    sig_draws.push_back(chain.state().sigma2);
    chain.update_tau2();
    tau_draws.push_back(chain.state().tau2);
    // restore the frozen variance so conditioning stays fixed
    ChainState back = chain.state();
    back.sigma2 = st.sigma2;
    back.tau2 = st.tau2;
    chain.set_state(back);
  }

  // inverse-gamma CDF: P(X <= x) = 1 - P_lower(shape, scale/x)
  auto ig_cdf = [](double shape, double scale) {
    return [shape, scale](double x) { return 1.0 - reg_lower_gamma(shape, scale / x); };
  };
  // KS critical value at alpha = 0.001 for n = 1e5
  const double crit = 1.9495 / std::sqrt(static_cast<double>(n_draws));
  CHECK(ks_statistic(sig_draws, ig_cdf(sig_shape, sig_scale)) < crit);
  CHECK(ks_statistic(tau_draws, ig_cdf(tau_shape, tau_scale)) < crit);
}

TEST_CASE("proposal adaptation direction and freeze") {
  const auto g = path_graph(3);
  const auto data = records_for(g, {2, 4, 6}, {30, 30, 30});
  CarChain chain(data, g, quick_config(9, 1000, 600, 1));

  const double before = chain.proposal_sds()[0];
  chain.adapt_proposals(std::vector<double>{0.9, 0.9, 0.9});
  const double up = chain.proposal_sds()[0];
  CHECK(up > before);
  chain.adapt_proposals(std::vector<double>{0.1, 0.1, 0.1});
  CHECK(chain.proposal_sds()[0] < up);
  // inside the target band: untouched
  const double mid = chain.proposal_sds()[1];
  chain.adapt_proposals(std::vector<double>{0.4, 0.4, 0.4});
  CHECK(chain.proposal_sds()[1] == mid);

  chain.run_burn_in();
  const std::vector<double> frozen(chain.proposal_sds().begin(), chain.proposal_sds().end());
  chain.adapt_proposals(std::vector<double>{0.9, 0.9, 0.9});  // no-op after burn-in
  chain.run_sampling();
  const std::vector<double> after(chain.proposal_sds().begin(), chain.proposal_sds().end());
  CHECK(frozen == after);
  const auto draws = chain.take_draws();
  CHECK(draws.accept.proposal_sd == frozen);
}

TEST_CASE("acceptance rates land in a sane band after adaptation") {
  const auto g = path_graph(6);
  const auto data = records_for(g, {5, 12, 3, 20, 9, 7}, {80, 120, 40, 200, 90, 77});
  const auto draws = fit_standard(data, g, quick_config(41, 12000, 6000, 3));
  for (double r : draws.accept.eta_acceptance) {
    CHECK(r > 0.15);
    CHECK(r < 0.75);
  }
}

TEST_CASE("zero-trial regions draw from the hierarchy") {
  const auto g = path_graph(4);
  auto data = records_for(g, {4, 0, 6, 5}, {50, 0, 60, 55});
  const auto draws = fit_standard(data, g, quick_config(17, 20000, 10000, 5));
  REQUIRE(draws.zero_trial_regions.size() == 1);
  const int iz = draws.zero_trial_regions[0];
  CHECK(draws.trials[iz] == 0);
  // finite, in-range, and wider than a data-rich region
  auto spread = [&](int i) {
    auto v = draws.pi[i];
    std::sort(v.begin(), v.end());
    return quantile_type7(v, 0.975) - quantile_type7(v, 0.025);
  };
  for (double v : draws.pi[iz]) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(spread(iz) > spread(0));
}

TEST_CASE("all-zero counts stay finite and shrink the rates") {
  const auto g = path_graph(4);
  const auto data = records_for(g, {0, 0, 0, 0}, {50, 50, 50, 50});
  const auto draws = fit_standard(data, g, quick_config(23, 8000, 4000, 2));
  for (int i = 0; i < 4; ++i) {
    auto v = draws.pi[i];
    std::sort(v.begin(), v.end());
    const double med = quantile_type7(v, 0.5);
    CHECK(std::isfinite(med));
    CHECK(med < 0.05);
  }
}

TEST_CASE("restricted fit keeps a0 under the bound in every draw") {
  const auto g = path_graph(6);
  const auto data = records_for(g, {9, 15, 4, 22, 11, 6}, {90, 140, 50, 210, 100, 70});
  ModelConfig cfg = quick_config(55, 6000, 3000, 3);
  cfg.restriction_bound = 5.0;
  const auto draws = fit_restricted(data, g, cfg);
  REQUIRE(draws.draw_count > 0);
  for (long long d = 0; d < draws.draw_count; ++d) {
    CHECK(draws.a0_hat[d] < 5.0);
    // recomputed through the informativeness module, not the sampler cache
    const double recomputed =
        a_hat_binomial({draws.beta0[d], draws.sigma2[d], draws.tau2[d], cfg.baseline_m0});
    CHECK(recomputed < 5.0);
    CHECK(recomputed == doctest::Approx(draws.a0_hat[d]).epsilon(1e-12));
  }
}

TEST_CASE("near-empty constraint region aborts with a diagnostic") {
  const auto g = path_graph(2);
  const auto data = records_for(g, {500, 480}, {1000, 1000});
  ModelConfig cfg = quick_config(3, 3000, 1000, 1);
  // with tau2 pinned, a0 < 0.05 needs sigma2 ~ 3, but the tight residuals
  // keep the sigma2 conditional around 0.01: the bound starves the update
  cfg.restriction_bound = 0.05;
  cfg.fix_tau2 = 0.01;
  CHECK_THROWS_AS(fit_restricted(data, g, cfg), sampler_error);
}

TEST_CASE("two-node posterior matches the quadrature oracle") {
  const auto g = path_graph(2);
  const auto data = records_for(g, {5, 9}, {50, 60});
  ModelConfig cfg = quick_config(7, 60000, 20000, 4);
  cfg.fix_sigma2 = 0.4;
  cfg.fix_tau2 = 0.6;
  const auto draws = fit_standard(data, g, cfg);
  const auto oracle = quadrature_posterior_2node(5, 50, 9, 60, 0.4, 0.6);
  auto mean_of = [&](int i) {
    double s = 0.0;
    for (double v : draws.pi[i]) s += v;
    return s / static_cast<double>(draws.pi[i].size());
  };
  CHECK(mean_of(0) == doctest::Approx(oracle.mean1).epsilon(0.02));
  CHECK(mean_of(1) == doctest::Approx(oracle.mean2).epsilon(0.02));
}
