#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "cascade/cascade_sim.hpp"
#include "cascade/errors.hpp"
#include "cascade/weight_model.hpp"

using namespace cascade;

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Leaf masses at the truncation depth, rebuilt from raw node weights with a
// plain per-leaf product; no shared state with the library's recursion.
std::vector<double> brute_leaf_masses(const CascadeConfig& cfg) {
  const int K = cfg.trunc_depth;
  std::vector<double> leaves(1ull << K);
  for (std::uint64_t word = 0; word < leaves.size(); ++word) {
    double log2p = 0.0;
    for (int j = 1; j <= K; ++j)
      log2p += sample_log2_weight(cfg.model, cfg.seed, j, word >> (K - j));
    leaves[word] = std::exp2(log2p - K);
  }
  return leaves;
}

}  // namespace

TEST_CASE("interval masses equal a per-leaf reconstruction") {
  for (const WeightModel& model :
       {WeightModel::lognormal(kLn2), WeightModel::twopoint(0.5)}) {
    CascadeConfig cfg;
    cfg.model = model;
    cfg.seed = 9;
    cfg.trunc_depth = 8;
    const std::vector<double> leaves = brute_leaf_masses(cfg);
    for (int k = 0; k <= 8; ++k) {
      for (std::uint64_t word = 0; word < (1ull << k); ++word) {
        double expect = 0.0;  // left-to-right, deliberately not the tree order
        for (std::uint64_t j = word << (8 - k); j < (word + 1) << (8 - k); ++j)
          expect += leaves[j];
        const double got = interval_mass(cfg, DyadicPath::from_word(word, k)).mass;
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("additivity is exact under the unit tail") {
  CascadeConfig cfg;
  cfg.model = WeightModel::lognormal(kLn2);
  cfg.seed = 1;
  cfg.trunc_depth = 10;
  for (int k = 0; k < 10; ++k) {
    for (std::uint64_t word = 0; word < (1ull << k); ++word) {
      const double parent = interval_mass(cfg, DyadicPath::from_word(word, k)).mass;
      const double left =
          interval_mass(cfg, DyadicPath::from_word(word << 1, k + 1)).mass;
      const double right =
          interval_mass(cfg, DyadicPath::from_word((word << 1) | 1, k + 1)).mass;
      CHECK(parent == left + right);
      CHECK(parent > 0.0);
    }
  }
  CHECK(total_mass(cfg) == interval_mass(cfg, DyadicPath()).mass);
}

TEST_CASE("extended tails of adjacent depths are consistent") {
  CascadeConfig deep;
  deep.model = WeightModel::twopoint(0.4);
  deep.seed = 17;
  deep.trunc_depth = 6;
  deep.tail = TailRule::extended(3);
  CascadeConfig shallow = deep;
  shallow.tail = TailRule::extended(2);
  for (int k = 0; k < 6; ++k) {
    for (std::uint64_t word = 0; word < (1ull << k); ++word) {
      const double parent = interval_mass(deep, DyadicPath::from_word(word, k)).mass;
      const double left =
          interval_mass(shallow, DyadicPath::from_word(word << 1, k + 1)).mass;
      const double right =
          interval_mass(shallow, DyadicPath::from_word((word << 1) | 1, k + 1)).mass;
      CHECK(parent == left + right);
    }
  }
}

TEST_CASE("mean mass of the left half is one half") {
  const int trials = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    CascadeConfig cfg;
    cfg.model = WeightModel::lognormal(kLn2);
    cfg.seed = mix64(static_cast<std::uint64_t>(i) + 1);
    cfg.trunc_depth = 8;
    const double m = interval_mass(cfg, DyadicPath::from_word(0, 1)).mass;
    sum += m;
    sumsq += m * m;
  }
  const double mean = sum / trials;
  const double var = (sumsq - sum * sum / trials) / (trials - 1);
  const double se = std::sqrt(var / trials);
  CHECK(std::fabs(mean - 0.5) < 3.0 * se);
}

TEST_CASE("cdf walks match the leaf prefix sums") {
  CascadeConfig cfg;
  cfg.model = WeightModel::twopoint(0.5);
  cfg.seed = 23;
  cfg.trunc_depth = 10;
  const int n = 1 << 10;

  std::vector<DyadicPath> paths;
  for (std::uint64_t w = 0; w < static_cast<std::uint64_t>(n); ++w)
    paths.push_back(DyadicPath::from_word(w, 10));
  const std::vector<MassResult> leaves = image_lengths_at_level(cfg, paths);

  double running = 0.0;
  CHECK(cdf_value(cfg, 0.0) == 0.0);
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    running += leaves[static_cast<std::size_t>(i - 1)].mass;
    const double f = cdf_value(cfg, static_cast<double>(i) / n);
    CHECK(f == doctest::Approx(running).epsilon(1e-12));
    CHECK(f >= prev - 1e-12 * running);
    prev = f;
  }
  CHECK(cdf_value(cfg, 1.0) == doctest::Approx(total_mass(cfg)).epsilon(1e-12));

  CHECK_THROWS_AS(cdf_value(cfg, 0.3), grid_error);  // not on the level-10 grid
  CHECK_THROWS_AS(cdf_value(cfg, -0.1), grid_error);
  CHECK_THROWS_AS(cdf_value(cfg, 1.1), grid_error);
}

TEST_CASE("heavy path counts against direct enumeration") {
  for (const WeightModel& model :
       {WeightModel::lognormal(kLn2), WeightModel::twopoint(0.7)}) {
    CascadeConfig cfg;
    cfg.model = model;
    cfg.seed = 4;
    cfg.trunc_depth = 10;
    for (double x : {0.1, 0.25, 0.6}) {
      for (int n : {3, 7, 10}) {
        std::uint64_t expect = 0;
        for (std::uint64_t word = 0; word < (1ull << n); ++word) {
          double log2p = 0.0;
          for (int j = 1; j <= n; ++j)
            log2p += sample_log2_weight(model, cfg.seed, j, word >> (n - j));
          if (log2p >= -(x + 0.05) * n) ++expect;
        }
        CHECK(count_large_product_paths(cfg, n, x, 0.05) == expect);
      }
    }
    // one traversal for many levels agrees with the one-level calls
    const std::vector<int> levels = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<std::uint64_t> multi =
        count_large_product_paths_multi(cfg, levels, 0.25, 0.05);
    for (std::size_t i = 0; i < levels.size(); ++i)
      CHECK(multi[i] == count_large_product_paths(cfg, levels[i], 0.25, 0.05));
  }
}

TEST_CASE("heavy path count edges") {
  CascadeConfig cfg;
  cfg.model = WeightModel::twopoint(0.5);
  cfg.seed = 12;
  cfg.trunc_depth = 4;
  // threshold 2^-50 sits below both support points, 2^50 above both
  CHECK(count_large_product_paths(cfg, 1, 50.0, 0.0) == 2);
  CHECK(count_large_product_paths(cfg, 1, -50.0, 0.0) == 0);
  CHECK_THROWS_AS(count_large_product_paths(cfg, 5, 0.2, 0.0), depth_error);
  CHECK_THROWS_AS(count_large_product_paths(cfg, 0, 0.2, 0.0), depth_error);
  CHECK_THROWS_AS(count_large_product_paths(cfg, 2, 0.2, -0.01), std::domain_error);
}

TEST_CASE("batch mass queries are bit-identical to standalone ones") {
  CascadeConfig cfg;
  cfg.model = WeightModel::lognormal(0.9);
  cfg.seed = 31;
  cfg.trunc_depth = 12;

  std::mt19937_64 rng(5);
  std::vector<DyadicPath> paths;
  for (int i = 0; i < 64; ++i) {
    const int level = static_cast<int>(rng() % 13);
    const std::uint64_t word = rng() & ((1ull << level) - 1);
    paths.push_back(DyadicPath::from_word(word, level));
  }
  paths.push_back(paths.front());  // duplicate on purpose

  const std::vector<MassResult> batch = image_lengths_at_level(cfg, paths);
  REQUIRE(batch.size() == paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    CHECK(batch[i].path == paths[i]);
    CHECK(batch[i].mass == interval_mass(cfg, paths[i]).mass);
  }

  std::vector<DyadicPath> reversed(paths.rbegin(), paths.rend());
  const std::vector<MassResult> rev = image_lengths_at_level(cfg, reversed);
  for (std::size_t i = 0; i < paths.size(); ++i)
    CHECK(rev[paths.size() - 1 - i].mass == batch[i].mass);

  const std::vector<MassResult> halves = image_lengths_at_level(
      cfg, {DyadicPath::from_word(0, 1), DyadicPath::from_word(1, 1)});
  CHECK(halves[0].mass + halves[1].mass == total_mass(cfg));
}

TEST_CASE("configuration guards") {
  CascadeConfig cfg;
  cfg.model = WeightModel::lognormal(kLn2);
  cfg.seed = 3;
  cfg.trunc_depth = 8;

  CHECK_THROWS_AS(interval_mass(cfg, DyadicPath::zeros(9)), depth_error);

  CascadeConfig bad = cfg;
  bad.trunc_depth = 0;
  CHECK_THROWS_AS(bad.validate(), depth_error);
  bad.trunc_depth = 41;
  CHECK_THROWS_AS(bad.validate(), depth_error);

  CascadeConfig tail = cfg;
  tail.tail = TailRule::extended(0);
  CHECK_THROWS_AS(tail.validate(), depth_error);
  tail.trunc_depth = 40;
  tail.tail = TailRule::extended(21);
  CHECK_THROWS_AS(tail.validate(), depth_error);  // 40 + 21 > 60

  CascadeConfig super = cfg;
  super.model = WeightModel::lognormal(1.6);
  CHECK_THROWS_AS(total_mass(super), regime_error);
}

TEST_CASE("log weights along a deep zero stem obey the strong law") {
  const WeightModel model = WeightModel::lognormal(kLn2);
  const double g = gamma(model);
  const double sd = 1.0 / std::sqrt(kLn2);  // sd of log2 W
  const int k = 10000;
  int good = 0;
  for (int s = 1; s <= 100; ++s) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j)
      acc += sample_log2_weight(model, static_cast<std::uint64_t>(s),
                                DyadicPath::zeros(j));
    if (std::fabs(acc / k + g) <= 4.0 * sd / std::sqrt(static_cast<double>(k)))
      ++good;
  }
  CHECK(good >= 95);
}
