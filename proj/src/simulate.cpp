#include "relmap/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "relmap/errors.hpp"
#include "relmap/reliability.hpp"
#include "relmap/special_functions.hpp"

namespace relmap {

std::vector<CountRecord> simulate(const SimScenario& sc) {
  const std::size_t I = sc.region_ids.size();
  if (sc.rates.size() != I || sc.trials.size() != I || I == 0) {
    throw validation_error("scenario requires matching nonempty region/rate/trial lists");
  }
  int outlier_idx = -1;
  if (!sc.outlier_region.empty()) {
    const auto it = std::find(sc.region_ids.begin(), sc.region_ids.end(), sc.outlier_region);
    if (it == sc.region_ids.end()) {
      throw validation_error("outlier region not in scenario: " + sc.outlier_region);
    }
    outlier_idx = static_cast<int>(it - sc.region_ids.begin());
  }

  std::vector<CountRecord> out;
  out.reserve(I);
  for (std::size_t i = 0; i < I; ++i) {
    double rate = sc.rates[i];
    if (static_cast<int>(i) == outlier_idx) rate *= sc.outlier_multiplier;
    if (rate < 0.0 || rate > 1.0) {
      throw validation_error("rate outside [0,1] for region " + sc.region_ids[i]);
    }
    if (sc.trials[i] < 0) {
      throw validation_error("negative trials for region " + sc.region_ids[i]);
    }
    // per-region stream: draws do not depend on region order
    Rng rng(stream_seed(sc.seed, sc.region_ids[i]));
    CountRecord rec;
    rec.region_id = sc.region_ids[i];
    rec.stratum = sc.stratum;
    rec.year = sc.year;
    rec.trials = sc.trials[i];
    rec.events = rng.binomial(sc.trials[i], rate);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> sample_rate_field(const AdjacencyGraph& g, double beta0, double sigma2,
                                      double tau2, Rng& rng, int gibbs_sweeps) {
  const int I = g.node_count();
  std::vector<double> z(I, 0.0);
  for (int sweep = 0; sweep < gibbs_sweeps; ++sweep) {
    for (int i = 0; i < I; ++i) {
      if (g.degree(i) == 0) {
        z[i] = 0.0;
        continue;
      }
      const auto [mean, var] = car_full_conditional(i, z, tau2, g);
      z[i] = mean + std::sqrt(var) * rng.normal();
    }
    // sum-to-zero per component
    std::vector<double> sums(g.component_count(), 0.0);
    std::vector<int> sizes(g.component_count(), 0);
    for (int i = 0; i < I; ++i) {
      sums[g.component_of()[i]] += z[i];
      ++sizes[g.component_of()[i]];
    }
    for (int i = 0; i < I; ++i) z[i] -= sums[g.component_of()[i]] / sizes[g.component_of()[i]];
  }
  std::vector<double> rates(I);
  for (int i = 0; i < I; ++i) {
    rates[i] = expit(beta0 + z[i] + std::sqrt(sigma2) * rng.normal());
  }
  return rates;
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

SimScenario read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open scenario file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  SimScenario sc;
  if (kv.count("regions")) {
    sc.region_ids = split_commas(kv["regions"]);
  } else if (kv.count("regions_file")) {
    std::ifstream rf(kv["regions_file"]);
    if (!rf) throw validation_error("cannot open regions file: " + kv["regions_file"]);
    std::string id;
    while (rf >> id) sc.region_ids.push_back(id);
  } else if (kv.count("edges")) {
    std::ifstream ef(kv["edges"]);
    if (!ef) throw validation_error("cannot open edges file: " + kv["edges"]);
    std::set<std::string> ids;
    while (std::getline(ef, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      std::string a, b;
      if (ss >> a >> b) {
        ids.insert(a);
        ids.insert(b);
      }
    }
    sc.region_ids.assign(ids.begin(), ids.end());
  } else {
    throw validation_error("scenario needs one of: regions, regions_file, edges");
  }
  const std::size_t I = sc.region_ids.size();

  if (kv.count("seed")) sc.seed = std::stoull(kv["seed"]);
  if (kv.count("stratum")) sc.stratum = kv["stratum"];
  if (kv.count("year")) sc.year = std::stoi(kv["year"]);
  if (kv.count("outlier_region")) sc.outlier_region = kv["outlier_region"];
  if (kv.count("outlier_multiplier")) sc.outlier_multiplier = std::stod(kv["outlier_multiplier"]);

  if (kv.count("rates")) {
    for (const auto& r : split_commas(kv["rates"])) sc.rates.push_back(std::stod(r));
  } else if (kv.count("rate")) {
    sc.rates.assign(I, std::stod(kv["rate"]));
  } else {
    throw validation_error("scenario needs rate or rates");
  }

  if (kv.count("trials_list")) {
    for (const auto& t : split_commas(kv["trials_list"])) sc.trials.push_back(std::stoll(t));
  } else if (kv.count("trials_range")) {
    const auto colon = kv["trials_range"].find(':');
    if (colon == std::string::npos) throw validation_error("trials_range must be lo:hi");
    const double lo = std::stod(kv["trials_range"].substr(0, colon));
    const double hi = std::stod(kv["trials_range"].substr(colon + 1));
    if (!(lo > 0.0) || !(hi >= lo)) throw validation_error("trials_range must satisfy 0 < lo <= hi");
    Rng rng(stream_seed(sc.seed, "trials-range"));
    sc.trials.resize(I);
    for (std::size_t i = 0; i < I; ++i) {
      sc.trials[i] = std::llround(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform()));
    }
  } else if (kv.count("trials")) {
    sc.trials.assign(I, std::stoll(kv["trials"]));
  } else {
    throw validation_error("scenario needs trials, trials_list, or trials_range");
  }

  if (sc.rates.size() != I || sc.trials.size() != I) {
    throw validation_error("scenario rates/trials lists must match the region count");
  }
  return sc;
}

std::vector<AggregationResult> aggregation_experiment(const std::vector<CountRecord>& records,
                                                      int window_years, double a0,
                                                      double level) {
  if (window_years < 1) throw validation_error("window_years must be >= 1");
  if (!(a0 > 0.0)) throw validation_error("a0 must be positive");

  std::set<std::string> strata;
  std::set<int> years;
  std::set<std::string> regions;
  for (const auto& r : records) {
    strata.insert(r.stratum);
    years.insert(r.year);
    regions.insert(r.region_id);
  }
  const std::vector<int> year_list(years.begin(), years.end());
  if (static_cast<int>(year_list.size()) < window_years) {
    throw validation_error("window wider than the data's year range");
  }

  // (stratum, region, year) -> (y, n)
  std::map<std::tuple<std::string, std::string, int>, std::pair<long long, long long>> cells;
  for (const auto& r : records) {
    auto& cell = cells[{r.stratum, r.region_id, r.year}];
    cell.first += r.events;
    cell.second += r.trials;
  }

  std::vector<AggregationResult> out;
  for (const auto& stratum : strata) {
    long long sy = 0, sn = 0;
    for (const auto& r : records) {
      if (r.stratum == stratum) {
        sy += r.events;
        sn += r.trials;
      }
    }
    if (sn == 0 || sy == 0) continue;  // no usable stratum mean rate
    const double mean_rate = static_cast<double>(sy) / static_cast<double>(sn);
    const BetaPrior prior = prior_from_rate(mean_rate, a0);

    for (std::size_t w = 0; w + window_years <= year_list.size(); ++w) {
      AggregationResult res;
      res.stratum = stratum;
      res.window_start = year_list[w];
      res.window_len = window_years;
      for (const auto& region : regions) {
        long long y = 0, n = 0;
        for (int k = 0; k < window_years; ++k) {
          const auto it = cells.find({stratum, region, year_list[w + k]});
          if (it != cells.end()) {
            y += it->second.first;
            n += it->second.second;
          }
        }
        ++res.counties_total;
        if (n < 1) continue;  // no population at risk: never reliable
        const CountRecord pooled{region, stratum, year_list[w], y, n};
        if (is_reliable(beta_posterior(pooled, prior), level)) ++res.counties_reliable;
      }
      res.fraction_reliable =
          res.counties_total > 0
              ? static_cast<double>(res.counties_reliable) / res.counties_total
              : 0.0;
      out.push_back(std::move(res));
    }
  }
  return out;
}

}  // namespace relmap
