#pragma once

#include <cstdint>
#include <vector>

#include "cascade/cascade_sim.hpp"
#include "cascade/point_sets.hpp"

namespace cascade {

// Scale exponents n against box counts N(2^-n).
struct CountSeries {
  std::vector<std::pair<int, std::uint64_t>> entries;
};

struct Window {
  int lo = 0;
  int hi = 0;
};

struct DimEstimate {
  double slope = 0.0;
  double stderr_ = 0.0;
  Window window;
  CountSeries series;
  std::vector<int> warned_scales;  // scales excluded for hitting the depth cap
};

// Number of level-n dyadic cells hit by the points; x = 1 is folded into
// the last cell.
std::uint64_t dyadic_cover_count(const std::vector<double>& sorted_points, int n);

struct CoverCount {
  std::uint64_t count = 0;
  std::uint64_t cap_hits = 0;  // stopped by depth, not by mass
  bool resolution_warning = false;
};

// Size of the stopping family for the image of E at mass threshold r: the
// E-intersecting dyadic intervals whose cascade mass first drops below r,
// plus any E-intersecting level-K interval still at or above r (those are
// flagged as cap hits; more than 1% of them raises the warning).
// r >= total mass yields 1.
CoverCount adaptive_image_cover(const CascadeConfig& cfg, const PointSetSpec& spec,
                                double r);

// Least-squares slope of log2 count against n over the window; needs at
// least 4 usable scales.
DimEstimate regression_dimension(const CountSeries& series, Window window);

// Counts at r = 2^-n * total mass for each exponent, then the regression
// over the window with warned scales dropped.
DimEstimate estimate_image_boxdim(const CascadeConfig& cfg, const PointSetSpec& spec,
                                  const std::vector<int>& scale_exponents,
                                  Window window);

// Seed averaging combines slopes, never raw counts.
double average_slope(const std::vector<DimEstimate>& estimates);

}  // namespace cascade
