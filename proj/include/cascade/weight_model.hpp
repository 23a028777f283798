#pragma once

#include <cstdint>
#include <string>

#include "cascade/dyadic.hpp"

namespace cascade {

enum class WeightKind { log_normal, two_point };

enum class Regime { subcritical, critical, supercritical };

// Mean-one multiplier distribution attached to every node of the binary
// cascade tree.
//
//   log_normal: W = exp(X), X ~ N(-sigma2/2, sigma2), so E(W) = 1.
//   two_point:  P(W = 1 - xi) = P(W = 1 + xi) = 1/2, 0 < xi < 1.
//
// Everything downstream is driven by the cumulant function
// t -> log2 E(W^t), its derivative, and gamma = -E(log2 W).
struct WeightModel {
  WeightKind kind = WeightKind::log_normal;
  double sigma2 = 0.0;  // log-normal variance, used iff kind == log_normal
  double xi = 0.0;      // two-point offset, used iff kind == two_point

  static WeightModel lognormal(double sigma2);
  static WeightModel twopoint(double xi);
};

struct RegimeReport {
  Regime regime;
  double w_logw;  // E(W log2 W)
  double gamma;   // -E(log2 W)
};

// log2 E(W^t) for t >= 0. Closed form for both models; stable for large t.
double log2_moment(const WeightModel& m, double t);

// d/dt log2 E(W^t); strictly increasing in t.
double log2_moment_slope(const WeightModel& m, double t);

// gamma = -E(log2 W) > 0.
double gamma(const WeightModel& m);

// Subcritical iff E(W log2 W) < 1; critical when equal within 1e-12.
RegimeReport classify_regime(const WeightModel& m);
bool is_subcritical(const WeightModel& m);
void require_subcritical(const WeightModel& m);

// Deterministic node weight: a pure function of (model, seed, path).
// Distinct paths give independent-quality draws; evaluation order never
// matters. The root (empty path) carries no weight.
double sample_weight(const WeightModel& m, std::uint64_t seed, const DyadicPath& path);
double sample_log2_weight(const WeightModel& m, std::uint64_t seed, const DyadicPath& path);

// Fast form for tree traversals: the node at `level` >= 1 whose word has
// numeric value `word`. Identical output to the DyadicPath overload.
double sample_log2_weight(const WeightModel& m, std::uint64_t seed, int level,
                          std::uint64_t word);

// Model strings: "lognormal:sigma2=<float>" or "twopoint:xi=<float>".
// With SigmaConvention::sigma the log-normal parameter value is read as
// sigma instead of sigma squared.
enum class SigmaConvention { sigma2, sigma };
WeightModel parse_model_spec(const std::string& spec,
                             SigmaConvention conv = SigmaConvention::sigma2);
std::string format_model_spec(const WeightModel& m);

}  // namespace cascade
