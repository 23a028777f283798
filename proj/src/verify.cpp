#include "cascade/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cascade/boxdim.hpp"
#include "cascade/cascade_sim.hpp"
#include "cascade/dimension_theory.hpp"
#include "cascade/dyadic.hpp"
#include "cascade/node_rng.hpp"
#include "cascade/parallel.hpp"
#include "cascade/point_sets.hpp"
#include "cascade/weight_model.hpp"

namespace cascade {
namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::uint64_t scramble64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// A1: the explicit log-normal evaluation and the generic grid-plus-polish
// optimizer must land on the same sequence image dimension.
Outcome check_a1(double ts) {
  const double tol = 1e-6 * ts;
  const double sigma2s[] = {0.2, std::numbers::ln2, 1.3};
  const double ps[] = {0.25, 0.5, 1.0, 2.0, 5.0};
  double worst = 0.0, at_s = 0.0, at_p = 0.0;
  for (double s2 : sigma2s) {
    const WeightModel model = WeightModel::lognormal(s2);
    for (double p : ps) {
      const double gap =
          std::fabs(lognormal_sequence_dim_closed_form(s2, p) - sequence_image_dim(model, p));
      if (gap > worst) {
        worst = gap;
        at_s = s2;
        at_p = p;
      }
    }
  }
  Outcome out;
  out.pass = worst < tol;
  out.detail = "max gap " + num(worst) + " at sigma2=" + num(at_s) + " p=" + num(at_p);
  return out;
}

// A2: the root equation solver is exact at d = 0, 1 and its residual stays
// below 1e-10 on a 100-point grid for both families.
Outcome check_a2(double ts) {
  const double tol_end = 1e-12 * ts;
  const double tol_res = 1e-10 * ts;
  const WeightModel models[] = {WeightModel::lognormal(std::numbers::ln2),
                                WeightModel::twopoint(0.99)};
  double worst_end = 0.0, worst_res = 0.0;
  for (const WeightModel& m : models) {
    worst_end = std::max(worst_end, std::fabs(hausdorff_image_dim(m, 0.0)));
    worst_end = std::max(worst_end, std::fabs(hausdorff_image_dim(m, 1.0) - 1.0));
    for (int i = 0; i < 100; ++i) {
      const double d = i / 99.0;
      const double s = hausdorff_image_dim(m, d);
      worst_res = std::max(worst_res, std::fabs(s - log2_moment(m, s) - d));
    }
  }
  Outcome out;
  out.pass = worst_end <= tol_end && worst_res < tol_res;
  out.detail = "endpoint error " + num(worst_end) + ", max residual " + num(worst_res);
  return out;
}

// A3: strict ordering s1 < dim < s2 across a 200-point p-grid for a
// near-critical log-normal and a wide two-point model, plus the p = 1 row
// at sigma2 = ln 2 against independently solvable constants.
Outcome check_a3(double ts) {
  const double margin = 1e-9 * ts;
  const WeightModel models[] = {WeightModel::lognormal(std::log(4.0) - 0.01),
                                WeightModel::twopoint(0.99)};
  std::vector<double> ps(200);
  for (int i = 0; i < 200; ++i) ps[i] = 0.05 + i * (4.95 / 199.0);
  double min_lo = HUGE_VAL, min_hi = HUGE_VAL;
  for (const WeightModel& m : models) {
    for (const BoundsRow& row : bounds_table(m, ps)) {
      min_lo = std::min(min_lo, row.dim - row.s1);
      min_hi = std::min(min_hi, row.s2 - row.dim);
    }
  }

  const BoundsRow row = bounds_table(WeightModel::lognormal(std::numbers::ln2), {1.0})[0];
  // At gamma = 1/2, p = 1 the interior maximizer is x0 = sqrt(7) - 5/2, the
  // dimension is (1 - (x0 - 1/2)^2 / 2) / (x0 + 5/2), and the root equation
  // s - s(s-1)/2 = 1/2 has the root (3 - sqrt(5))/2.
  const double x0 = std::sqrt(7.0) - 2.5;
  const double dim_ref = (1.0 - 0.5 * (x0 - 0.5) * (x0 - 0.5)) / (x0 + 2.5);
  const double e1 = std::fabs(row.s1 - 1.0 / 3.0);
  const double e2 = std::fabs(row.dim - dim_ref);
  const double e3 = std::fabs(row.s2 - (3.0 - std::sqrt(5.0)) / 2.0);

  Outcome out;
  out.pass = min_lo > margin && min_hi > margin && e1 < 1e-12 * ts && e2 < 1e-6 * ts &&
             e3 < 1e-10 * ts;
  out.detail = "min gaps " + num(min_lo) + "/" + num(min_hi) + ", p=1 row errors " + num(e1) +
               " " + num(e2) + " " + num(e3);
  return out;
}

// A4: dim / s1 -> 1 as d -> 0.
Outcome check_a4(double ts) {
  const double tol = 0.01 * ts;
  const WeightModel models[] = {WeightModel::lognormal(std::numbers::ln2),
                                WeightModel::twopoint(0.99)};
  double worst = 0.0;
  for (const WeightModel& m : models)
    worst = std::max(worst, std::fabs(asymptotic_ratio(m, 1e-4) - 1.0));
  Outcome out;
  out.pass = worst <= tol;
  out.detail = "max |ratio - 1| = " + num(worst) + " at d = 1e-4";
  return out;
}

// A5: plain dyadic box counting recovers the known dimensions of the
// power sequence (1/2) and the middle-thirds Cantor set (log 2 / log 3).
Outcome check_a5(double ts) {
  const Window window{8, 20};

  const std::vector<double> seq_pts = enumerate_points(PointSetSpec::power(1.0, 1 << 20));
  CountSeries seq_series;
  for (int n = 0; n <= 20; ++n) seq_series.entries.push_back({n, dyadic_cover_count(seq_pts, n)});
  const double slope_seq = regression_dimension(seq_series, window).slope;

  const std::vector<double> can_pts = enumerate_points(PointSetSpec::cantor(1.0 / 3.0, 13));
  CountSeries can_series;
  for (int n = 0; n <= 20; ++n) can_series.entries.push_back({n, dyadic_cover_count(can_pts, n)});
  const double slope_can = regression_dimension(can_series, window).slope;

  const double target_can = std::numbers::ln2 / std::log(3.0);
  const double e1 = std::fabs(slope_seq - 0.5);
  const double e2 = std::fabs(slope_can - target_can);
  Outcome out;
  out.pass = e1 < 0.05 * ts && e2 < 0.03 * ts;
  out.detail = "power slope " + num(slope_seq) + " (want 0.5), cantor slope " + num(slope_can) +
               " (want " + num(target_can) + ")";
  return out;
}

// Literal stopping-family count: walk every dyadic cell level by level and
// apply the selection rule with standalone mass queries. Deliberately shares
// no traversal code with adaptive_image_cover.
std::uint64_t brute_stopping_family(const CascadeConfig& cfg, const PointSetSpec& spec,
                                    double r) {
  const std::vector<double> pts = enumerate_points(with_auto_cutoff(spec, cfg.trunc_depth));
  const double total = total_mass(cfg);
  if (r >= total) return 1;
  const int K = cfg.trunc_depth;
  std::uint64_t count = 0;
  for (int k = 1; k <= K; ++k) {
    const std::uint64_t last = (1ull << k) - 1;
    std::vector<std::uint64_t> hit;
    hit.reserve(pts.size());
    for (double x : pts) {
      const std::uint64_t w = static_cast<std::uint64_t>(std::ldexp(x, k));
      hit.push_back(std::min(w, last));
    }
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    for (std::uint64_t w : hit) {
      const DyadicPath cell = DyadicPath::from_word(w, k);
      const double mass = interval_mass(cfg, cell).mass;
      if (mass < r) {
        if (interval_mass(cfg, cell.parent()).mass >= r) ++count;
      } else if (k == K) {
        ++count;
      }
    }
  }
  return count;
}

// A6: the adaptive cover agrees exactly with the brute force on 100
// deterministic (seed, r) pairs, two model/set combinations.
Outcome check_a6(double) {
  int mismatches = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const bool lognormal_half = i < 50;
    CascadeConfig cfg;
    cfg.model = lognormal_half ? WeightModel::lognormal(std::numbers::ln2)
                               : WeightModel::twopoint(0.5);
    cfg.seed = 1001 + static_cast<std::uint64_t>(i);
    cfg.trunc_depth = 12;
    const PointSetSpec spec =
        lognormal_half ? PointSetSpec::power(1.0, 0) : PointSetSpec::cantor(1.0 / 3.0, 8);

    const U64x2 h = threefry2x64({static_cast<std::uint64_t>(i), 0xA6}, {2026, 0});
    const double u = 0.5 + 11.0 * node_uniform(h);
    const double r = total_mass(cfg) * std::exp2(-u);

    const std::uint64_t adaptive = adaptive_image_cover(cfg, spec, r).count;
    const std::uint64_t brute = brute_stopping_family(cfg, spec, r);
    if (adaptive != brute) {
      ++mismatches;
      if (first.empty())
        first = " first at pair " + std::to_string(i) + ": " + std::to_string(adaptive) +
                " vs " + std::to_string(brute);
    }
  }
  Outcome out;
  out.pass = mismatches == 0;
  out.detail = std::to_string(100 - mismatches) + "/100 pairs exact" + first;
  return out;
}

// A7: growth rate of the number of level-n words with weight product at
// least 2^{-(x+delta) n} matches 1 + psi(x).
Outcome check_a7(double ts) {
  const double target = 0.96875;  // 1 + psi(1/4) at gamma = 1/2
  std::vector<int> levels;
  for (int n = 12; n <= 22; ++n) levels.push_back(n);
  std::vector<std::uint64_t> seeds(8);
  std::iota(seeds.begin(), seeds.end(), 1);

  const std::vector<double> slopes = parallel_map(seeds, [&](std::uint64_t seed) {
    CascadeConfig cfg;
    cfg.model = WeightModel::lognormal(std::numbers::ln2);
    cfg.seed = seed;
    cfg.trunc_depth = 22;
    const std::vector<std::uint64_t> counts =
        count_large_product_paths_multi(cfg, levels, 0.25, 0.05);
    CountSeries series;
    for (std::size_t i = 0; i < levels.size(); ++i)
      series.entries.push_back({levels[i], counts[i]});
    return regression_dimension(series, {12, 22}).slope;
  });
  const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / slopes.size();

  Outcome out;
  out.pass = std::fabs(mean - target) <= 0.15 * ts;
  out.detail = "mean slope " + num(mean) + " (want " + num(target) + " +- " + num(0.15 * ts) + ")";
  return out;
}

// A8: Monte Carlo image dimensions at finite depth, seed-averaged.
Outcome check_a8(double ts) {
  const WeightModel model = WeightModel::lognormal(std::numbers::ln2);
  std::vector<std::uint64_t> seeds(8);
  std::iota(seeds.begin(), seeds.end(), 1);

  const auto run = [&](const PointSetSpec& spec, int depth, const std::vector<int>& scales,
                       Window window) {
    const std::vector<DimEstimate> ests = parallel_map(seeds, [&](std::uint64_t seed) {
      CascadeConfig cfg;
      cfg.model = model;
      cfg.seed = seed;
      cfg.trunc_depth = depth;
      return estimate_image_boxdim(cfg, spec, scales, window);
    });
    return average_slope(ests);
  };

  // Depth 22 for both families: occasional heavy realizations (seeds 3 and 7
  // here) keep whole subtrees above threshold far down the tree, and the
  // extra levels let those masses decay below the fine-scale thresholds
  // instead of flooding the series with resolution warnings. The windows sit
  // low enough that every seed keeps at least four unwarned scales.
  std::vector<int> scales_cantor;
  for (int n = 1; n <= 13; ++n) scales_cantor.push_back(n);
  const double avg_cantor = run(PointSetSpec::cantor(0.25, 0), 22, scales_cantor, {4, 13});
  const double target_cantor = hausdorff_image_dim(model, 0.5);

  std::vector<int> scales_seq;
  for (int n = 1; n <= 14; ++n) scales_seq.push_back(n);
  const double avg_seq = run(PointSetSpec::power(1.0, 0), 22, scales_seq, {5, 14});
  const double target_seq = sequence_image_dim(model, 1.0);

  const double e1 = std::fabs(avg_cantor - target_cantor);
  const double e2 = std::fabs(avg_seq - target_seq);
  Outcome out;
  out.pass = e1 <= 0.1 * ts && e2 <= 0.1 * ts;
  out.detail = "cantor " + num(avg_cantor) + " (want " + num(target_cantor) + "), power " +
               num(avg_seq) + " (want " + num(target_seq) + ")";
  return out;
}

// A9: exact additivity under the unit tail, unbiased mean total mass, and
// byte-identical results across reruns, query orders, and thread counts.
Outcome check_a9(double ts) {
  std::vector<std::string> faults;

  // Exact additivity over the full tree, both families.
  const WeightModel fams[] = {WeightModel::lognormal(std::numbers::ln2),
                              WeightModel::twopoint(0.5)};
  const int depths[] = {10, 12};
  const std::uint64_t seeds9[] = {7, 11};
  for (int f = 0; f < 2; ++f) {
    CascadeConfig cfg;
    cfg.model = fams[f];
    cfg.seed = seeds9[f];
    cfg.trunc_depth = depths[f];
    bool exact = true;
    for (int k = 0; k < cfg.trunc_depth && exact; ++k) {
      for (std::uint64_t w = 0; w < (1ull << k); ++w) {
        const DyadicPath node = DyadicPath::from_word(w, k);
        const double parent = interval_mass(cfg, node).mass;
        const double sum = interval_mass(cfg, node.child(0)).mass +
                           interval_mass(cfg, node.child(1)).mass;
        if (parent != sum) {
          exact = false;
          faults.push_back("additivity broke at level " + std::to_string(k) + " word " +
                           std::to_string(w) + " (family " + std::to_string(f) + ")");
          break;
        }
      }
    }
  }

  // Mean total mass across 10^4 seeds within 3 s.e. of 1. Trial seeds are
  // spread over the whole key space; a consecutive block would tie every
  // trial to the same handful of top-of-tree draws and make the statistic
  // hostage to that one block.
  const WeightModel mean_fams[] = {WeightModel::lognormal(0.3),
                                   WeightModel::lognormal(std::numbers::ln2),
                                   WeightModel::twopoint(0.5)};
  double worst_z = 0.0;
  for (const WeightModel& m : mean_fams) {
    std::vector<std::uint64_t> seeds(10000);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = scramble64(i + 1);
    const std::vector<double> totals = parallel_map(seeds, [&](std::uint64_t s) {
      CascadeConfig cfg;
      cfg.model = m;
      cfg.seed = s;
      cfg.trunc_depth = 12;
      return total_mass(cfg);
    });
    const double n = static_cast<double>(totals.size());
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
    double ss = 0.0;
    for (double t : totals) ss += (t - mean) * (t - mean);
    const double se = std::sqrt(ss / (n - 1.0) / n);
    const double z = std::fabs(mean - 1.0) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0 * ts)
      faults.push_back("mean total mass " + num(mean) + " is " + num(z) + " s.e. from 1");
  }

  // Determinism: identical answers for repeated, reordered, and batched
  // queries, and for different worker counts.
  {
    CascadeConfig cfg;
    cfg.model = WeightModel::lognormal(std::numbers::ln2);
    cfg.seed = 42;
    cfg.trunc_depth = 12;
    std::mt19937_64 gen(123);
    std::vector<DyadicPath> paths;
    for (int i = 0; i < 300; ++i) {
      const int level = static_cast<int>(gen() % 13);
      const std::uint64_t word = level == 0 ? 0 : gen() % (1ull << level);
      paths.push_back(DyadicPath::from_word(word, level));
    }
    std::vector<double> v1, v2(paths.size()), v4;
    for (const DyadicPath& p : paths) v1.push_back(interval_mass(cfg, p).mass);
    for (std::size_t i = paths.size(); i-- > 0;) v2[i] = interval_mass(cfg, paths[i]).mass;
    const std::vector<MassResult> batch = image_lengths_at_level(cfg, paths);
    for (const DyadicPath& p : paths) v4.push_back(interval_mass(cfg, p).mass);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (v1[i] != v2[i] || v1[i] != batch[i].mass || v1[i] != v4[i]) {
        faults.push_back("mass query " + std::to_string(i) + " changed across evaluations");
        break;
      }
    }
  }
  {
    // Signature of one realization: total, cover counts over a ladder of
    // thresholds, and a few deep interval masses.
    const auto probe = [](std::uint64_t seed) {
      CascadeConfig cfg;
      cfg.model = WeightModel::twopoint(0.5);
      cfg.seed = seed;
      cfg.trunc_depth = 12;
      const PointSetSpec spec = PointSetSpec::cantor(1.0 / 3.0, 0);
      std::vector<double> sig;
      const double total = total_mass(cfg);
      sig.push_back(total);
      for (int n = 1; n <= 8; ++n)
        sig.push_back(static_cast<double>(
            adaptive_image_cover(cfg, spec, std::ldexp(total, -n)).count));
      for (std::uint64_t j = 0; j < 8; ++j)
        sig.push_back(
            interval_mass(cfg, DyadicPath::from_word((seed * 37 + j * 311) & 0xFFF, 12)).mass);
      return sig;
    };
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
    struct EnvGuard {
      std::string saved;
      bool had = false;
      EnvGuard(const char* v) {
        if (const char* cur = std::getenv("CASCADE_DIM_THREADS")) {
          saved = cur;
          had = true;
        }
        ::setenv("CASCADE_DIM_THREADS", v, 1);
      }
      ~EnvGuard() {
        if (had)
          ::setenv("CASCADE_DIM_THREADS", saved.c_str(), 1);
        else
          ::unsetenv("CASCADE_DIM_THREADS");
      }
    };
    std::vector<std::vector<double>> serial, fanned;
    {
      EnvGuard env("1");
      serial = parallel_map(seeds, probe);
    }
    {
      EnvGuard env("4");
      fanned = parallel_map(seeds, probe);
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (serial[i] != fanned[i]) {
        faults.push_back("realization for seed " + std::to_string(seeds[i]) +
                         " depends on the worker count");
        break;
      }
    }
  }

  Outcome out;
  out.pass = faults.empty();
  out.detail = faults.empty() ? "additivity exact, worst mean-mass z = " + num(worst_z) +
                                    ", determinism holds"
                              : faults.front();
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts) {
  struct Entry {
    const char* id;
    const char* title;
    double budget_seconds;
    Outcome (*fn)(double);
  };
  static const Entry entries[] = {
      {"A1", "log-normal closed form matches the variational optimum", 1.0, &check_a1},
      {"A2", "root equation endpoints and residual", 1.0, &check_a2},
      {"A3", "strict bound ordering with the pinned p=1 row", 5.0, &check_a3},
      {"A4", "dimension-to-lower-bound ratio tends to 1", 1.0, &check_a4},
      {"A5", "deterministic box counts for known sets", 10.0, &check_a5},
      {"A6", "adaptive cover equals the brute-force stopping family", 30.0, &check_a6},
      {"A7", "large-deviation path-count growth exponent", 60.0, &check_a7},
      {"A8", "Monte Carlo image dimensions", 300.0, &check_a8},
      {"A9", "simulator additivity, mean mass, determinism", 60.0, &check_a9},
  };

  std::vector<CriterionResult> results;
  for (const Entry& e : entries) {
    if (!opts.only.empty() &&
        std::find(opts.only.begin(), opts.only.end(), e.id) == opts.only.end())
      continue;
    CriterionResult r;
    r.id = e.id;
    r.title = e.title;
    const auto t0 = Clock::now();
    Outcome oc;
    try {
      oc = e.fn(opts.tolerance_scale);
    } catch (const std::exception& ex) {
      oc.pass = false;
      oc.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = oc.pass;
    r.detail = oc.detail;
    if (r.pass && r.seconds > e.budget_seconds) {
      r.pass = false;
      r.detail += " [over the " + num(e.budget_seconds) + " s budget]";
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace cascade
