#include "cascade/boxdim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

// Masses of every E-intersecting interval down to the truncation depth,
// from one post-order sweep of the full weight tree. The sweep adds left
// subtree before right exactly like interval_mass, so stored values are
// bit-identical to standalone queries. Only meaningful for the unit tail,
// where coarse masses are sums of their children.
class UnitMassCache {
 public:
  UnitMassCache(const CascadeConfig& cfg, const std::vector<double>& points)
      : cfg_(cfg), points_(points) {
    masses_.reserve(1024);
    total_ = sweep(0, 0, 0.0, 0, points_.size());
  }

  double total() const { return total_; }

  // Mass of an E-intersecting node recorded during the sweep.
  double mass(int level, std::uint64_t word) const {
    return masses_.at(key(level, word));
  }

  bool intersects(int level, std::uint64_t word) const {
    return masses_.contains(key(level, word));
  }

 private:
  static std::uint64_t key(int level, std::uint64_t word) {
    return (static_cast<std::uint64_t>(level) << 58) | word;
  }

  double sweep(int level, std::uint64_t word, double log2_prefix, std::size_t plo,
               std::size_t phi) {
    bool marked = plo < phi;
    double mass;
    if (level == cfg_.trunc_depth) {
      mass = std::exp2(log2_prefix - static_cast<double>(level));
    } else {
      std::uint64_t w0 = word << 1, w1 = (word << 1) | 1u;
      // Split the point range at the midpoint of this interval; the right
      // half keeps the closed upper edge so x = 1 stays in the last cell.
      std::size_t cut = plo;
      if (marked) {
        double mid = static_cast<double>(w1) * std::ldexp(1.0, -(level + 1));
        cut = static_cast<std::size_t>(
            std::lower_bound(points_.begin() + static_cast<std::ptrdiff_t>(plo),
                             points_.begin() + static_cast<std::ptrdiff_t>(phi), mid) -
            points_.begin());
      }
      double left = sweep(level + 1, w0,
                          log2_prefix + sample_log2_weight(cfg_.model, cfg_.seed, level + 1, w0),
                          plo, cut);
      double right = sweep(level + 1, w1,
                           log2_prefix + sample_log2_weight(cfg_.model, cfg_.seed, level + 1, w1),
                           cut, phi);
      mass = left + right;
    }
    if (marked) masses_.emplace(key(level, word), mass);
    return mass;
  }

  const CascadeConfig& cfg_;
  const std::vector<double>& points_;
  std::unordered_map<std::uint64_t, double> masses_;
  double total_ = 0.0;
};

// Point-range test for the extended-tail path, where no cache is built.
bool interval_hits_points(const std::vector<double>& pts, int level,
                          std::uint64_t word) {
  double lo = static_cast<double>(word) * std::ldexp(1.0, -level);
  auto it = std::lower_bound(pts.begin(), pts.end(), lo);
  if (it == pts.end()) return false;
  if (word + 1 == (1ull << level)) return true;  // rightmost cell is closed
  double hi = static_cast<double>(word + 1) * std::ldexp(1.0, -level);
  return *it < hi;
}

struct CoverContext {
  const CascadeConfig& cfg;
  const std::vector<double>& points;
  const UnitMassCache* cache;  // null for extended tails

  double node_mass(int level, std::uint64_t word) const {
    if (cache) return cache->mass(level, word);
    return interval_mass(cfg, DyadicPath::from_word(word, level)).mass;
  }

  bool node_marked(int level, std::uint64_t word) const {
    if (cache) return cache->intersects(level, word);
    return interval_hits_points(points, level, word);
  }

  double total() const {
    if (cache) return cache->total();
    return total_mass(cfg);
  }
};

CoverCount run_cover(const CoverContext& ctx, double r) {
  if (!(r > 0.0)) throw std::domain_error("adaptive_image_cover: r must be positive");
  CoverCount out;
  if (r >= ctx.total()) {
    out.count = 1;
    return out;
  }
  struct Node {
    int level;
    std::uint64_t word;
  };
  std::vector<Node> stack = {{0, 0}};  // root mass >= r by the check above
  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    if (nd.level == ctx.cfg.trunc_depth) {
      ++out.count;  // still heavy at the floor of the tree
      ++out.cap_hits;
      continue;
    }
    for (std::uint64_t b = 0; b < 2; ++b) {
      std::uint64_t w = (nd.word << 1) | b;
      if (!ctx.node_marked(nd.level + 1, w)) continue;
      if (ctx.node_mass(nd.level + 1, w) < r)
        ++out.count;
      else
        stack.push_back({nd.level + 1, w});
    }
  }
  out.resolution_warning =
      out.count > 0 && static_cast<double>(out.cap_hits) > 0.01 * static_cast<double>(out.count);
  return out;
}

}  // namespace

std::uint64_t dyadic_cover_count(const std::vector<double>& sorted_points, int n) {
  if (n < 0 || n > 60)
    throw std::domain_error("dyadic_cover_count: level must lie in [0, 60]");
  if (sorted_points.empty())
    throw shape_error("dyadic_cover_count: empty point list");
  std::uint64_t cells = 1ull << n;
  std::uint64_t count = 0;
  std::uint64_t prev = 0;
  bool first = true;
  for (double x : sorted_points) {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("dyadic_cover_count: points must lie in [0,1]");
    std::uint64_t idx = static_cast<std::uint64_t>(std::ldexp(x, n));
    if (idx >= cells) idx = cells - 1;  // x = 1
    if (first || idx != prev) {
      ++count;
      prev = idx;
      first = false;
    }
  }
  return count;
}

CoverCount adaptive_image_cover(const CascadeConfig& cfg, const PointSetSpec& spec,
                                double r) {
  cfg.validate();
  std::vector<double> pts = enumerate_points(with_auto_cutoff(spec, cfg.trunc_depth));
  if (cfg.tail.kind == TailRule::Kind::unit) {
    UnitMassCache cache(cfg, pts);
    return run_cover({cfg, pts, &cache}, r);
  }
  return run_cover({cfg, pts, nullptr}, r);
}

DimEstimate regression_dimension(const CountSeries& series, Window window) {
  if (window.lo > window.hi)
    throw window_error("regression_dimension: empty window");
  std::vector<std::pair<double, double>> xy;
  for (auto [n, count] : series.entries) {
    if (n < window.lo || n > window.hi) continue;
    if (count == 0) continue;
    xy.push_back({static_cast<double>(n), std::log2(static_cast<double>(count))});
  }
  if (xy.size() < 4)
    throw window_error("regression_dimension: need at least 4 scales in the window");

  double mx = 0, my = 0;
  for (auto [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  double slope = sxy / sxx;
  double sse = 0;
  for (auto [x, y] : xy) {
    double resid = y - my - slope * (x - mx);
    sse += resid * resid;
  }
  double stderr_ = xy.size() > 2
                       ? std::sqrt(std::max(sse, 0.0) / (static_cast<double>(xy.size()) - 2.0) / sxx)
                       : 0.0;

  DimEstimate est;
  est.slope = slope;
  est.stderr_ = stderr_;
  est.window = window;
  est.series = series;
  return est;
}

DimEstimate estimate_image_boxdim(const CascadeConfig& cfg, const PointSetSpec& spec,
                                  const std::vector<int>& scale_exponents,
                                  Window window) {
  cfg.validate();
  if (scale_exponents.empty())
    throw window_error("estimate_image_boxdim: no scales given");
  std::vector<int> scales = scale_exponents;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  if (scales.front() < 1)
    throw std::domain_error("estimate_image_boxdim: scale exponents must be >= 1");

  std::vector<double> pts = enumerate_points(with_auto_cutoff(spec, cfg.trunc_depth));
  std::optional<UnitMassCache> cache;
  if (cfg.tail.kind == TailRule::Kind::unit) cache.emplace(cfg, pts);
  CoverContext ctx{cfg, pts, cache ? &*cache : nullptr};

  double total = ctx.total();
  CountSeries series;
  std::vector<int> warned;
  for (int n : scales) {
    // Thresholds are proportional to the realized total mass, so the root
    // martingale fluctuation cancels from the slope.
    CoverCount cc = run_cover(ctx, std::ldexp(total, -n));
    series.entries.push_back({n, cc.count});
    if (cc.resolution_warning) warned.push_back(n);
  }

  CountSeries usable;
  for (auto e : series.entries)
    if (!std::binary_search(warned.begin(), warned.end(), e.first))
      usable.entries.push_back(e);
  DimEstimate est = regression_dimension(usable, window);
  est.series = series;
  est.warned_scales = warned;
  return est;
}

double average_slope(const std::vector<DimEstimate>& estimates) {
  if (estimates.empty())
    throw window_error("average_slope: no estimates");
  double acc = 0.0;
  for (const DimEstimate& e : estimates) acc += e.slope;
  return acc / static_cast<double>(estimates.size());
}

}  // namespace cascade
