#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cascade/boxdim.hpp"
#include "cascade/cascade_sim.hpp"
#include "cascade/errors.hpp"
#include "cascade/point_sets.hpp"
#include "cascade/weight_model.hpp"

using namespace cascade;

namespace {

// Independent stopping-family count: walk marked intervals top down with
// standalone mass queries and stop where the mass first drops below r.
// Mirrors the production traversal in structure but shares no code with it.
bool cell_has_point(const std::vector<double>& pts, int level, std::uint64_t word) {
  const double lo = std::ldexp(static_cast<double>(word), -level);
  auto it = std::lower_bound(pts.begin(), pts.end(), lo);
  if (it == pts.end()) return false;
  if (word + 1 == (1ull << level)) return true;  // rightmost cell keeps x = 1
  return *it < std::ldexp(static_cast<double>(word + 1), -level);
}

void brute_stopping_family(const CascadeConfig& cfg, const std::vector<double>& pts,
                           double r, int level, std::uint64_t word,
                           std::uint64_t& members, std::uint64_t& floored) {
  if (level == cfg.trunc_depth) {
    ++members;
    ++floored;
    return;
  }
  for (std::uint64_t b = 0; b < 2; ++b) {
    const std::uint64_t w = (word << 1) | b;
    if (!cell_has_point(pts, level + 1, w)) continue;
    if (interval_mass(cfg, DyadicPath::from_word(w, level + 1)).mass < r)
      ++members;
    else
      brute_stopping_family(cfg, pts, r, level + 1, w, members, floored);
  }
}

CountSeries series_of(std::vector<std::pair<int, std::uint64_t>> entries) {
  CountSeries s;
  s.entries = std::move(entries);
  return s;
}

}  // namespace

TEST_CASE("dyadic cover counts") {
  CHECK(dyadic_cover_count({0.0, 1.0}, 1) == 2);
  CHECK(dyadic_cover_count({0.0, 1.0}, 0) == 1);
  CHECK(dyadic_cover_count({0.3}, 4) == 1);

  // {0} u {1/m}: the cells above 2^-n/2 pick out distinct values of
  // floor(2^n/m), the cells below are all occupied, giving exactly
  // 2 * 2^(n/2) cells for even n.
  const std::vector<double> harmonic =
      enumerate_points(with_auto_cutoff(parse_set_spec("seq:p=1"), 20));
  CHECK(dyadic_cover_count(harmonic, 4) == 8);
  CHECK(dyadic_cover_count(harmonic, 6) == 16);
  CHECK(dyadic_cover_count(harmonic, 8) == 32);
  CHECK(dyadic_cover_count(harmonic, 10) == 64);
  CHECK(dyadic_cover_count(harmonic, 12) == 128);

  // middle-thirds endpoints at scale 2^-8: at least 2^(8 log 2/log 3) cells,
  // at most 3 cells per construction interval of length 3^-5
  const std::vector<double> cantor =
      enumerate_points(PointSetSpec::cantor(1.0 / 3.0, 12));
  const std::uint64_t at8 = dyadic_cover_count(cantor, 8);
  CHECK(at8 >= 34);
  CHECK(at8 <= 96);

  // refining the grid never merges cells
  std::uint64_t prev = 1;
  for (int n = 0; n <= 14; ++n) {
    const std::uint64_t c = dyadic_cover_count(cantor, n);
    CHECK(c >= prev);
    CHECK(c <= cantor.size());
    prev = c;
  }

  // a subset never covers more
  std::vector<double> sparse;
  for (std::size_t i = 0; i < cantor.size(); i += 2) sparse.push_back(cantor[i]);
  for (int n : {4, 8, 12})
    CHECK(dyadic_cover_count(sparse, n) <= dyadic_cover_count(cantor, n));

  CHECK_THROWS_AS(dyadic_cover_count({0.5}, -1), std::domain_error);
  CHECK_THROWS_AS(dyadic_cover_count({0.5}, 61), std::domain_error);
  CHECK_THROWS_AS(dyadic_cover_count({0.5, 1.5}, 3), std::domain_error);
  CHECK_THROWS_AS(dyadic_cover_count({}, 3), shape_error);
}

TEST_CASE("regression slopes") {
  // counts on an exact power law: slope recovered exactly
  const DimEstimate half = regression_dimension(
      series_of({{4, 8}, {6, 16}, {8, 32}, {10, 64}, {12, 128}}), {4, 12});
  CHECK(half.slope == 0.5);
  CHECK(half.stderr_ == 0.0);
  CHECK(half.window.lo == 4);
  CHECK(half.window.hi == 12);

  const DimEstimate one = regression_dimension(
      series_of({{1, 2}, {2, 4}, {3, 8}, {4, 16}, {5, 32}}), {1, 5});
  CHECK(one.slope == doctest::Approx(1.0).epsilon(1e-12));

  // zero counts are skipped, the rest still sit on the exact line
  const DimEstimate gap = regression_dimension(
      series_of({{1, 2}, {2, 0}, {3, 8}, {4, 16}, {5, 32}, {6, 64}}), {1, 6});
  CHECK(gap.slope == doctest::Approx(1.0).epsilon(1e-12));

  // the window clips entries outside it
  const DimEstimate clipped = regression_dimension(
      series_of({{1, 1000}, {4, 8}, {6, 16}, {8, 32}, {10, 64}, {12, 128}}),
      {4, 12});
  CHECK(clipped.slope == 0.5);

  CHECK_THROWS_AS(regression_dimension(
                      series_of({{1, 2}, {2, 4}, {3, 8}, {4, 16}}), {1, 3}),
                  window_error);
  CHECK_THROWS_AS(regression_dimension(series_of({{1, 2}, {2, 4}}), {2, 1}),
                  window_error);
}

TEST_CASE("adaptive cover basics") {
  const CascadeConfig cfg{WeightModel::twopoint(0.5), 42, 6, TailRule::unit()};
  const PointSetSpec spec = parse_set_spec("seq:p=1");
  const double total = total_mass(cfg);

  // threshold at or above the whole mass: one interval suffices
  for (double r : {total, 2.0 * total, 100.0}) {
    const CoverCount cc = adaptive_image_cover(cfg, spec, r);
    CHECK(cc.count == 1);
    CHECK(cc.cap_hits == 0);
    CHECK_FALSE(cc.resolution_warning);
  }

  // xi = 1/2 bounds every level-6 mass below by 2^-12, so a 2^-40 threshold
  // drives every marked interval into the depth cap and trips the warning
  const CoverCount floor6 = adaptive_image_cover(cfg, spec, std::ldexp(total, -40));
  const std::vector<double> pts = enumerate_points(with_auto_cutoff(spec, 6));
  CHECK(floor6.count == dyadic_cover_count(pts, 6));
  CHECK(floor6.cap_hits == floor6.count);
  CHECK(floor6.resolution_warning);

  CHECK_THROWS_AS(adaptive_image_cover(cfg, spec, 0.0), std::domain_error);
  CHECK_THROWS_AS(adaptive_image_cover(cfg, spec, -1.0), std::domain_error);
}

TEST_CASE("stopping family counts are pinched by the weight range") {
  // ratio-1/2 cantor endpoints mark every dyadic cell, so the stopping
  // family tiles all of [0,1] and its masses add up to the full mass. With
  // xi = 0.2 each member sits in [0.4 r, r), which pinches the count
  // between total/r and total/(0.4 r). Depth 12 keeps the family well clear
  // of the cap: 0.6^12 is already below the 2^-5 threshold.
  const CascadeConfig cfg{WeightModel::twopoint(0.2), 5, 12, TailRule::unit()};
  const PointSetSpec everywhere = parse_set_spec("cantor:ratio=0.5");
  const double total = total_mass(cfg);

  const CoverCount cc = adaptive_image_cover(cfg, everywhere, std::ldexp(total, -5));
  CHECK(cc.cap_hits == 0);
  CHECK_FALSE(cc.resolution_warning);
  // every member is lighter than r, so at least total/r of them are needed
  CHECK(cc.count > 32);
  CHECK(cc.count < 2048);

  // tightening the threshold can only refine the family
  std::uint64_t prev = 1;
  for (int n = 1; n <= 12; ++n) {
    const std::uint64_t c =
        adaptive_image_cover(cfg, everywhere, std::ldexp(total, -n)).count;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("adaptive cover agrees with a standalone walk") {
  const PointSetSpec specs[] = {parse_set_spec("seq:p=1"),
                                parse_set_spec("cantor:ratio=0.333333")};
  const WeightModel models[] = {WeightModel::lognormal(std::log(2.0)),
                                WeightModel::twopoint(0.5)};
  const TailRule tails[] = {TailRule::unit(), TailRule::extended(2)};

  int checked = 0;
  for (int i = 0; i < 25; ++i) {
    const CascadeConfig cfg{models[i % 2], 101 + 7u * static_cast<unsigned>(i), 10,
                            tails[(i / 2) % 2]};
    const PointSetSpec& spec = specs[(i / 4) % 2];
    const double r = std::ldexp(total_mass(cfg), -(1 + i % 9));

    const CoverCount cc = adaptive_image_cover(cfg, spec, r);
    const std::vector<double> pts = enumerate_points(with_auto_cutoff(spec, 10));
    std::uint64_t members = 0, floored = 0;
    brute_stopping_family(cfg, pts, r, 0, 0, members, floored);
    CHECK(cc.count == members);
    CHECK(cc.cap_hits == floored);
    ++checked;
  }
  CHECK(checked == 25);
}

TEST_CASE("box dimension estimates track the known set dimensions") {
  // A nearly deterministic cascade halves every mass per level, so the
  // stopping family at threshold total * 2^-n sits within one level of the
  // plain dyadic cover at scale n and the fitted slope lands on the nominal
  // box dimension of the underlying set.
  const WeightModel flat = WeightModel::lognormal(1e-8);
  std::vector<int> scales;
  for (int n = 5; n <= 18; ++n) scales.push_back(n);

  const PointSetSpec sets[] = {parse_set_spec("cantor:ratio=0.45"),
                               parse_set_spec("seq:p=1"),
                               parse_set_spec("seq:p=2")};
  double prev_slope = 2.0;
  for (const PointSetSpec& spec : sets) {
    const CascadeConfig cfg{flat, 11, 20, TailRule::unit()};
    const DimEstimate est = estimate_image_boxdim(cfg, spec, scales, {8, 18});
    const double nominal = nominal_box_dimension(spec);
    CAPTURE(spec.source);
    CAPTURE(est.slope);
    CHECK(std::abs(est.slope - nominal) < 0.12);
    CHECK(est.slope < prev_slope - 0.05);
    prev_slope = est.slope;

    REQUIRE(est.series.entries.size() == scales.size());
    std::uint64_t prev_count = 0;
    for (auto [n, c] : est.series.entries) {
      CHECK(c >= prev_count);
      prev_count = c;
    }
    for (int w : est.warned_scales)
      CHECK(std::find(scales.begin(), scales.end(), w) != scales.end());
  }
}

TEST_CASE("estimate guards") {
  const CascadeConfig cfg{WeightModel::twopoint(0.5), 9, 6, TailRule::unit()};
  const PointSetSpec spec = parse_set_spec("seq:p=1");

  // every scale this deep hits the cap, gets warned, and leaves nothing
  CHECK_THROWS_AS(
      estimate_image_boxdim(cfg, spec, {30, 31, 32, 33, 34}, {30, 34}),
      window_error);
  CHECK_THROWS_AS(estimate_image_boxdim(cfg, spec, {}, {1, 5}), window_error);
  CHECK_THROWS_AS(estimate_image_boxdim(cfg, spec, {0, 1, 2, 3}, {0, 3}),
                  std::domain_error);

  // duplicate scales collapse
  const CascadeConfig deep{WeightModel::twopoint(0.5), 9, 14, TailRule::unit()};
  const DimEstimate est = estimate_image_boxdim(
      deep, spec, {3, 3, 4, 4, 5, 6, 7, 8}, {3, 8});
  CHECK(est.series.entries.size() == 6);
}

TEST_CASE("slope averaging") {
  DimEstimate a, b, c;
  a.slope = 0.25;
  b.slope = 0.5;
  c.slope = 1.0;
  CHECK(average_slope({a, b, c}) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
  CHECK(average_slope({b}) == 0.5);
  CHECK_THROWS_AS(average_slope({}), window_error);
}
