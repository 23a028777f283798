#pragma once

#include <cstdint>
#include <vector>

#include "cascade/dyadic.hpp"
#include "cascade/weight_model.hpp"

namespace cascade {

inline constexpr int kMaxTruncDepth = 40;
inline constexpr int kMaxSampledDepth = 60;  // truncation plus extended tail

// How the mass beyond the resolved tree is approximated.
//
//   unit:        leaves at the truncation depth K get tail factor 1, so the
//                realization is one exactly additive measure on the level-K
//                dyadic grid. Masses of coarser intervals are the sums over
//                their level-K descendants.
//   extended(m): the queried interval's tail factor is replaced by its own
//                depth-m martingale approximant, i.e. the weight tree is
//                followed m levels below the query. Masses at level k with
//                depth m match sums of level k+1 masses with depth m-1;
//                meant for truncation-bias studies, not for additivity.
struct TailRule {
  enum class Kind { unit, extended };
  Kind kind = Kind::unit;
  int depth = 0;

  static TailRule unit() { return {Kind::unit, 0}; }
  static TailRule extended(int m) { return {Kind::extended, m}; }
};

// One realization of the cascade, truncated at depth K. Purely declarative:
// every query is a deterministic function of (model, seed), so configs are
// freely copied and queried from any thread.
struct CascadeConfig {
  WeightModel model;
  std::uint64_t seed = 0;
  int trunc_depth = 1;  // K
  TailRule tail = TailRule::unit();

  void validate() const;
};

struct MassResult {
  DyadicPath path;
  double mass;
};

// mu(I_path) for |path| <= K under the config's tail rule.
MassResult interval_mass(const CascadeConfig& cfg, const DyadicPath& path);

// mu([0,1]): mass of the empty path.
double total_mass(const CascadeConfig& cfg);

// f_K(x) = mu([0, x)) for x on the level-K dyadic grid; f_K(1) includes the
// rightmost interval. Summation is left-to-right along the path of x.
double cdf_value(const CascadeConfig& cfg, double x);

// Number of level-n words whose weight product satisfies
// W_{i_1} ... W_{i_1..i_n} >= 2^{-(x+delta) n}. Requires n <= K. Products
// are compared in log2, so arbitrarily small two-point weights are safe.
std::uint64_t count_large_product_paths(const CascadeConfig& cfg, int n, double x,
                                        double delta);

// Same counts for several levels out of a single traversal to max(levels).
std::vector<std::uint64_t> count_large_product_paths_multi(
    const CascadeConfig& cfg, const std::vector<int>& levels, double x, double delta);

// Batch interval_mass; each output is bit-identical to the standalone call.
std::vector<MassResult> image_lengths_at_level(const CascadeConfig& cfg,
                                               const std::vector<DyadicPath>& paths);

}  // namespace cascade
