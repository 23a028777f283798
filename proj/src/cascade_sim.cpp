#include "cascade/cascade_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

// Sum of 2^-target * (product of weights root..leaf) over all level-target
// descendants of the node (level, word), given the log2 weight product
// accumulated from the root down to that node. The recursion always adds
// left subtree first, so the floating-point result for any node is
// reproduced exactly when the same node is reached through a different
// query (this is what makes additivity checks exact).
double martingale_sum(const WeightModel& model, std::uint64_t seed, int level,
                      std::uint64_t word, double log2_prefix, int target) {
  if (level == target) return std::exp2(log2_prefix - static_cast<double>(target));
  std::uint64_t w0 = word << 1, w1 = (word << 1) | 1u;
  double left = martingale_sum(model, seed, level + 1, w0,
                               log2_prefix + sample_log2_weight(model, seed, level + 1, w0),
                               target);
  double right = martingale_sum(model, seed, level + 1, w1,
                                log2_prefix + sample_log2_weight(model, seed, level + 1, w1),
                                target);
  return left + right;
}

// log2 of the weight product along the path, accumulated root-first.
double path_log2_product(const CascadeConfig& cfg, const DyadicPath& path) {
  double acc = 0.0;
  std::uint64_t word = 0;
  for (int j = 1; j <= path.length(); ++j) {
    word = (word << 1) | static_cast<std::uint64_t>(path.bit(j));
    acc += sample_log2_weight(cfg.model, cfg.seed, j, word);
  }
  return acc;
}

int tail_target(const CascadeConfig& cfg, int query_level) {
  return cfg.tail.kind == TailRule::Kind::unit ? cfg.trunc_depth
                                               : query_level + cfg.tail.depth;
}

}  // namespace

void CascadeConfig::validate() const {
  require_subcritical(model);
  if (trunc_depth < 1 || trunc_depth > kMaxTruncDepth)
    throw depth_error("cascade: truncation depth must lie in [1, 40]");
  if (tail.kind == TailRule::Kind::extended) {
    if (tail.depth < 1)
      throw depth_error("cascade: extended tail depth must be >= 1");
    if (trunc_depth + tail.depth > kMaxSampledDepth)
      throw depth_error("cascade: truncation depth plus tail depth must be <= 60");
  }
}

MassResult interval_mass(const CascadeConfig& cfg, const DyadicPath& path) {
  cfg.validate();
  if (path.length() > cfg.trunc_depth)
    throw depth_error("interval_mass: path deeper than the truncation depth");
  double prefix = path_log2_product(cfg, path);
  double mass = martingale_sum(cfg.model, cfg.seed, path.length(), path.word(), prefix,
                               tail_target(cfg, path.length()));
  return {path, mass};
}

double total_mass(const CascadeConfig& cfg) {
  return interval_mass(cfg, DyadicPath()).mass;
}

double cdf_value(const CascadeConfig& cfg, double x) {
  cfg.validate();
  if (!(x >= 0.0 && x <= 1.0))
    throw grid_error("cdf_value: x must lie in [0,1]");
  double scaled = std::ldexp(x, cfg.trunc_depth);
  if (scaled != std::floor(scaled))
    throw grid_error("cdf_value: x is not on the level-K dyadic grid");
  std::uint64_t j = static_cast<std::uint64_t>(scaled);

  // Left siblings along the path of x, summed top level first.
  double acc = 0.0;
  DyadicPath prefix;
  bool include_last = false;
  std::uint64_t bits = j;
  if (j == (1ull << cfg.trunc_depth)) {
    bits = j - 1;  // all-ones path: every left sibling plus the leaf itself
    include_last = true;
  }
  for (int level = 1; level <= cfg.trunc_depth; ++level) {
    int b = static_cast<int>((bits >> (cfg.trunc_depth - level)) & 1u);
    if (b == 1) acc += interval_mass(cfg, prefix.child(0)).mass;
    prefix = prefix.child(b);
  }
  if (include_last) acc += interval_mass(cfg, prefix).mass;
  return acc;
}

std::uint64_t count_large_product_paths(const CascadeConfig& cfg, int n, double x,
                                        double delta) {
  std::vector<std::uint64_t> counts =
      count_large_product_paths_multi(cfg, {n}, x, delta);
  return counts[0];
}

std::vector<std::uint64_t> count_large_product_paths_multi(
    const CascadeConfig& cfg, const std::vector<int>& levels, double x, double delta) {
  cfg.validate();
  if (!(delta >= 0.0))
    throw std::domain_error("count_large_product_paths: delta must be nonnegative");
  if (levels.empty())
    throw std::domain_error("count_large_product_paths: no levels given");
  int max_level = 0;
  for (int n : levels) {
    if (n < 1 || n > cfg.trunc_depth)
      throw depth_error("count_large_product_paths: level must lie in [1, K]");
    max_level = std::max(max_level, n);
  }

  std::vector<char> wanted(static_cast<std::size_t>(max_level) + 1, 0);
  for (int n : levels) wanted[static_cast<std::size_t>(n)] = 1;
  std::vector<std::uint64_t> count_at(static_cast<std::size_t>(max_level) + 1, 0);

  // Full traversal: products are not monotone along a path, so no pruning.
  struct Frame {
    int level;
    std::uint64_t word;
    double log2_prod;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0.0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.level > 0 && wanted[static_cast<std::size_t>(f.level)] &&
        f.log2_prod >= -(x + delta) * static_cast<double>(f.level))
      ++count_at[static_cast<std::size_t>(f.level)];
    if (f.level == max_level) continue;
    for (std::uint64_t b = 0; b < 2; ++b) {
      std::uint64_t w = (f.word << 1) | b;
      stack.push_back(
          {f.level + 1, w,
           f.log2_prod + sample_log2_weight(cfg.model, cfg.seed, f.level + 1, w)});
    }
  }

  std::vector<std::uint64_t> out;
  out.reserve(levels.size());
  for (int n : levels) out.push_back(count_at[static_cast<std::size_t>(n)]);
  return out;
}

std::vector<MassResult> image_lengths_at_level(const CascadeConfig& cfg,
                                               const std::vector<DyadicPath>& paths) {
  cfg.validate();
  // Shared prefixes are evaluated once; the accumulation order per node is
  // the same root-first order as the standalone query, so results match it
  // bit for bit.
  std::unordered_map<std::uint64_t, double> prefix_log;
  prefix_log.reserve(paths.size() * 2);
  auto key = [](int level, std::uint64_t word) {
    return (static_cast<std::uint64_t>(level) << 58) | word;
  };

  std::vector<MassResult> out;
  out.reserve(paths.size());
  for (const DyadicPath& path : paths) {
    if (path.length() > cfg.trunc_depth)
      throw depth_error("image_lengths_at_level: path deeper than the truncation depth");
    double acc = 0.0;
    std::uint64_t word = 0;
    for (int j = 1; j <= path.length(); ++j) {
      word = (word << 1) | static_cast<std::uint64_t>(path.bit(j));
      auto it = prefix_log.find(key(j, word));
      if (it != prefix_log.end()) {
        acc = it->second;
      } else {
        acc += sample_log2_weight(cfg.model, cfg.seed, j, word);
        prefix_log.emplace(key(j, word), acc);
      }
    }
    double mass = martingale_sum(cfg.model, cfg.seed, path.length(), path.word(), acc,
                                 tail_target(cfg, path.length()));
    out.push_back({path, mass});
  }
  return out;
}

}  // namespace cascade
