#pragma once

#include <string>

namespace relmap {

// One observation: events out of trials for a (region, stratum, year) cell.
// trials == 0 is a legal cell in stratified data (no population at risk);
// conjugate-posterior operations require trials >= 1 and reject such records.
struct CountRecord {
  std::string region_id;
  std::string stratum;
  int year = 0;
  long long events = 0;
  long long trials = 0;

  void validate() const;  // throws validation_error
};

}  // namespace relmap
