#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relmap/adjacency_graph.hpp"
#include "relmap/count_data.hpp"
#include "relmap/rng.hpp"

namespace relmap {

// One stratum-year cell of synthetic data: binomial draws at the given
// per-region rates and trial counts, with an optional planted outlier whose
// rate is multiplied before drawing.
struct SimScenario {
  std::vector<std::string> region_ids;
  std::vector<double> rates;       // in [0,1]
  std::vector<long long> trials;
  std::string stratum = "all";
  int year = 2020;
  std::string outlier_region;      // empty: no outlier
  double outlier_multiplier = 1.0;
  std::uint64_t seed = 1;
};

std::vector<CountRecord> simulate(const SimScenario& sc);

// Rate field drawn from the generative hierarchy: z from the intrinsic CAR
// by Gibbs sweeps (sum-to-zero per component), then
// expit(beta0 + z_i + Normal(0, sigma2)).
std::vector<double> sample_rate_field(const AdjacencyGraph& g, double beta0, double sigma2,
                                      double tau2, Rng& rng, int gibbs_sweeps = 200);

// key=value scenario file. Recognized keys: regions (comma list) or
// regions_file or edges (node ids from an edge list); rate or rates;
// trials, trials_list, or trials_range=lo:hi (log-uniform per region);
// stratum, year, seed, outlier_region, outlier_multiplier.
SimScenario read_scenario(const std::string& path);

struct AggregationResult {
  std::string stratum;
  int window_start = 0;
  int window_len = 0;
  int counties_total = 0;
  int counties_reliable = 0;
  double fraction_reliable = 0.0;
};

// Pools events/trials over sliding year windows, assesses each county with
// a conjugate prior contributing a0 cases at the stratum mean rate, and
// reports the reliable-county fraction per window.
std::vector<AggregationResult> aggregation_experiment(const std::vector<CountRecord>& records,
                                                      int window_years, double a0,
                                                      double level = 0.95);

}  // namespace relmap
