#include "relmap/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relmap/errors.hpp"
#include "relmap/rng.hpp"

namespace relmap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

long long parse_count(const std::string& s, const std::string& what, const std::string& where) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw validation_error(where + ": cannot parse " + what + " '" + s + "'");
  }
  if (pos != s.size()) throw validation_error(where + ": cannot parse " + what + " '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& where) {
  if (s.empty()) return 0.0;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw validation_error(where + ": cannot parse number '" + s + "'");
  }
  if (pos != s.size()) throw validation_error(where + ": cannot parse number '" + s + "'");
  return v;
}

}  // namespace

std::vector<std::string> Dataset::strata() const {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.stratum);
  return {s.begin(), s.end()};
}

std::vector<int> Dataset::years() const {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.year);
  return {s.begin(), s.end()};
}

std::vector<std::string> Dataset::regions() const {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.region_id);
  return {s.begin(), s.end()};
}

std::vector<CountRecord> Dataset::cell(const std::string& stratum, int year) const {
  std::vector<CountRecord> out;
  for (const auto& r : records) {
    if (r.stratum == stratum && r.year == year) out.push_back(r);
  }
  return out;
}

std::uint64_t Dataset::hash() const {
  // order-independent: hash sorted canonical rows
  std::vector<std::string> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back(r.region_id + "," + r.stratum + "," + std::to_string(r.year) + "," +
                   std::to_string(r.events) + "," + std::to_string(r.trials));
  }
  std::sort(rows.begin(), rows.end());
  std::uint64_t h = fnv1a64("dataset");
  for (const auto& row : rows) h = splitmix64(h ^ fnv1a64(row));
  return h;
}

Dataset read_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open counts file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + ": empty file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"region_id", "stratum", "year", "events", "trials"};
  if (header != expected) {
    throw validation_error(path + ": header must be 'region_id,stratum,year,events,trials'");
  }

  Dataset ds;
  std::set<std::tuple<std::string, std::string, int>> keys;
  long long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw validation_error(where + ": expected 5 fields, got " + std::to_string(fields.size()));
    }
    CountRecord rec;
    rec.region_id = fields[0];
    rec.stratum = fields[1];
    rec.year = static_cast<int>(parse_count(fields[2], "year", where));
    rec.events = parse_count(fields[3], "events", where);
    rec.trials = parse_count(fields[4], "trials", where);
    try {
      rec.validate();
    } catch (const validation_error& e) {
      throw validation_error(where + ": " + e.what());
    }
    if (!keys.insert({rec.region_id, rec.stratum, rec.year}).second) {
      throw validation_error(where + ": duplicate key (" + rec.region_id + ", " + rec.stratum +
                             ", " + std::to_string(rec.year) + ")");
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write summary file: " + path);
  out << kSummaryHeader << "\n";
  for (const auto& r : rows) {
    out << r.region_id << ',' << r.stratum << ',' << r.year << ',' << r.events << ','
        << r.trials << ',' << format_double(r.crude_rate) << ',' << format_double(r.median)
        << ',' << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ','
        << format_double(r.level) << ',' << format_double(r.relative_precision) << ','
        << format_double(r.reliability_level) << ',' << (r.reliable ? "true" : "false") << ','
        << r.flag << "\n";
  }
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open summary file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + ": empty file");
  if (split_csv_line(line) != split_csv_line(kSummaryHeader)) {
    throw validation_error(path + ": unexpected summary header");
  }
  std::vector<SummaryRow> rows;
  long long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != 14) {
      throw validation_error(where + ": expected 14 fields, got " + std::to_string(f.size()));
    }
    SummaryRow r;
    r.region_id = f[0];
    r.stratum = f[1];
    r.year = static_cast<int>(parse_count(f[2], "year", where));
    r.events = parse_count(f[3], "events", where);
    r.trials = parse_count(f[4], "trials", where);
    r.crude_rate = parse_real(f[5], where);
    r.median = parse_real(f[6], where);
    r.ci_low = parse_real(f[7], where);
    r.ci_high = parse_real(f[8], where);
    r.level = parse_real(f[9], where);
    r.relative_precision = parse_real(f[10], where);
    r.reliability_level = parse_real(f[11], where);
    r.reliable = (f[12] == "true");
    r.flag = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write draws file: " + path);
  out << "iter,beta0,sigma2,tau2,a0_hat";
  for (const auto& id : draws.region_ids) out << ",pi_" << id;
  for (const auto& id : draws.region_ids) out << ",z_" << id;
  out << "\n";
  for (long long d = 0; d < draws.draw_count; ++d) {
    out << d << ',' << format_double(draws.beta0[d]) << ',' << format_double(draws.sigma2[d])
        << ',' << format_double(draws.tau2[d]) << ',' << format_double(draws.a0_hat[d]);
    for (const auto& pi : draws.pi) out << ',' << format_double(pi[d]);
    for (const auto& z : draws.z) out << ',' << format_double(z[d]);
    out << "\n";
  }
}

int DrawsDump::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return -1;
  return static_cast<int>(it - columns.begin());
}

DrawsDump read_draws_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open draws file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + ": empty file");
  DrawsDump dump;
  dump.columns = split_csv_line(line);
  dump.data.resize(dump.columns.size());
  long long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != dump.columns.size()) {
      throw validation_error(where + ": expected " + std::to_string(dump.columns.size()) +
                             " fields, got " + std::to_string(f.size()));
    }
    for (std::size_t c = 0; c < f.size(); ++c) dump.data[c].push_back(parse_real(f[c], where));
  }
  return dump;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["model"] = m.model;
  j["inputs"] = {{"counts", m.counts_path},
                 {"edges", m.edges_path},
                 {"data_hash", m.data_hash},
                 {"graph_hash", m.graph_hash}};
  j["config"] = {{"total_iterations", m.config.total_iterations},
                 {"burn_in", m.config.burn_in},
                 {"thin", m.config.thin},
                 {"baseline_m0", m.config.baseline_m0},
                 {"proposal_sd_init", m.config.proposal_sd_init},
                 {"sigma2_prior", {m.config.sigma2_prior.shape, m.config.sigma2_prior.scale}},
                 {"tau2_prior", {m.config.tau2_prior.shape, m.config.tau2_prior.scale}}};
  if (m.config.restriction_bound) j["config"]["restriction_bound"] = *m.config.restriction_bound;
  j["run_seed"] = m.run_seed;
  j["level"] = m.level;
  j["threads"] = m.threads;
  j["wall_ms"] = m.wall_ms;
  j["chains"] = nlohmann::json::array();
  for (const auto& c : m.chains) {
    j["chains"].push_back({{"stratum", c.stratum},
                           {"year", c.year},
                           {"seed", c.seed},
                           {"mean_eta_acceptance", c.mean_eta_acceptance},
                           {"max_stall_rate", c.max_stall_rate},
                           {"retained_draws", c.retained_draws},
                           {"min_ess", c.min_ess},
                           {"max_split_rhat", c.max_split_rhat},
                           {"a0_median", c.a0_median},
                           {"a0_ci", {c.a0_lo, c.a0_hi}},
                           {"wall_ms", c.wall_ms}});
  }
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

MergeReport merge_geojson(const std::vector<SummaryRow>& summary, const std::string& geojson_path,
                          const std::string& join_key, const std::string& out_path) {
  std::ifstream in(geojson_path);
  if (!in) throw validation_error("cannot open GeoJSON: " + geojson_path);
  nlohmann::json gj;
  try {
    in >> gj;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(geojson_path + ": invalid JSON: " + e.what());
  }
  if (!gj.is_object() || gj.value("type", "") != "FeatureCollection" || !gj.contains("features")) {
    throw validation_error(geojson_path + ": expected a GeoJSON FeatureCollection");
  }

  std::map<std::string, const SummaryRow*> by_region;
  for (const auto& row : summary) {
    if (!by_region.emplace(row.region_id, &row).second) {
      throw validation_error("summary has multiple rows for region " + row.region_id +
                             "; filter to one stratum and year before merging");
    }
  }

  MergeReport report;
  std::set<std::string> matched_regions;
  for (auto& feature : gj["features"]) {
    if (!feature.contains("properties") || !feature["properties"].is_object()) {
      feature["properties"] = nlohmann::json::object();
    }
    auto& props = feature["properties"];
    if (!props.contains(join_key)) {
      report.unmatched_features.push_back("<missing " + join_key + ">");
      continue;
    }
    const std::string key = props[join_key].is_string()
                                ? props[join_key].get<std::string>()
                                : props[join_key].dump();
    const auto it = by_region.find(key);
    if (it == by_region.end()) {
      report.unmatched_features.push_back(key);
      continue;
    }
    const SummaryRow& row = *it->second;
    props["median"] = row.median;
    props["relative_precision"] = row.relative_precision;
    props["reliability_level"] = row.reliability_level;
    props["reliable"] = row.reliable;
    matched_regions.insert(key);
    ++report.matched;
  }
  for (const auto& [region, row] : by_region) {
    if (!matched_regions.count(region)) report.unmatched_rows.push_back(region);
  }

  gj["relmap_merge"] = {{"version", kVersion},
                        {"join_key", join_key},
                        {"matched", report.matched},
                        {"unmatched_features", report.unmatched_features},
                        {"unmatched_rows", report.unmatched_rows}};

  std::ofstream out(out_path);
  if (!out) throw validation_error("cannot write GeoJSON: " + out_path);
  out << gj.dump(1) << "\n";
  return report;
}

}  // namespace relmap
