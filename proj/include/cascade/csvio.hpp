#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cascade/boxdim.hpp"

namespace cascade {

// Locale-independent decimal rendering, 15 significant digits.
std::string format_double(double v);

// Comment header written before the CSV payload. Reruns of the same command
// differ only in the timestamp line; data rows are byte-identical.
struct RunManifest {
  std::string command;
  std::string model;
  std::string set;
  std::string seeds;
  int depth = 0;  // 0 means "not applicable"

  std::vector<std::string> comment_lines() const;
};

void write_manifest(std::ostream& os, const RunManifest& m);

// header "n,count"
void write_count_series_csv(std::ostream& os, const CountSeries& series);

// header "slope,stderr,n_lo,n_hi"
void write_dim_estimate_csv(std::ostream& os, const DimEstimate& est);

}  // namespace cascade
