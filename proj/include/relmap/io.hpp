#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relmap/car_sampler.hpp"
#include "relmap/count_data.hpp"

namespace relmap {

inline constexpr const char* kVersion = "0.1.0";

// Validated stratified count data: one row per (region, stratum, year).
struct Dataset {
  std::vector<CountRecord> records;

  std::vector<std::string> strata() const;
  std::vector<int> years() const;
  std::vector<std::string> regions() const;
  std::vector<CountRecord> cell(const std::string& stratum, int year) const;
  std::uint64_t hash() const;
};

// CSV with header region_id,stratum,year,events,trials. Rejects malformed
// rows, duplicate keys, negative counts, and events > trials, naming the
// offending line.
Dataset read_counts(const std::string& path);

// doubles serialized with 12 significant digits everywhere
std::string format_double(double v);

struct SummaryRow {
  std::string region_id;
  std::string stratum;
  int year = 0;
  long long events = 0;
  long long trials = 0;
  double crude_rate = 0.0;
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  double relative_precision = 0.0;
  double reliability_level = 0.0;
  bool reliable = false;
  std::string flag;
};

inline constexpr const char* kSummaryHeader =
    "region_id,stratum,year,events,trials,crude_rate,median,ci_low,ci_high,level,"
    "relative_precision,reliability_level,reliable,flag";

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// Draws dump: one row per retained iteration, columns
// iter,beta0,sigma2,tau2,a0_hat,pi_<id>...,z_<id>...
void write_draws_csv(const std::string& path, const PosteriorDraws& draws);

struct DrawsDump {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // [column][row]

  int column_index(const std::string& name) const;  // -1 if absent
};

DrawsDump read_draws_csv(const std::string& path);

struct ChainReport {
  std::string stratum;
  int year = 0;
  std::uint64_t seed = 0;
  double mean_eta_acceptance = 0.0;
  double max_stall_rate = 0.0;
  long long retained_draws = 0;
  double min_ess = 0.0;
  double max_split_rhat = 0.0;
  double a0_median = 0.0;
  double a0_lo = 0.0;
  double a0_hi = 0.0;
  long long wall_ms = 0;
};

// Everything needed to reproduce a run bit-exactly, plus per-chain health.
struct RunManifest {
  std::string command;
  std::string version = kVersion;
  std::string model;  // "standard" | "restricted"
  std::string counts_path;
  std::string edges_path;
  std::uint64_t data_hash = 0;
  std::uint64_t graph_hash = 0;
  ModelConfig config;
  std::uint64_t run_seed = 0;
  double level = 0.95;
  int threads = 1;
  long long wall_ms = 0;
  std::vector<ChainReport> chains;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

struct MergeReport {
  long long matched = 0;
  std::vector<std::string> unmatched_features;  // join-key values without a summary row
  std::vector<std::string> unmatched_rows;      // summary regions without a feature
};

// Injects median/relative_precision/reliability_level/reliable into each
// feature's properties by matching properties[join_key] against region_id.
// The summary must contain at most one row per region (filter by stratum and
// year first). Adds a top-level "relmap_merge" member describing the merge.
MergeReport merge_geojson(const std::vector<SummaryRow>& summary, const std::string& geojson_path,
                          const std::string& join_key, const std::string& out_path);

}  // namespace relmap
