#include "cascade/dimension_theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

// inf over t of x t + log2 E(W^t) via bisection on the derivative
// x + (d/dt) log2 E(W^t), which is strictly increasing. For x < gamma the
// derivative is negative at 0 and positive at 1, so [0,1] brackets the
// minimizer; the bracket is widened defensively all the same.
LegendreResult psi_inner(const WeightModel& m, double x) {
  double lo = 0.0, hi = 1.0;
  int widen = 0;
  while (x + log2_moment_slope(m, hi) <= 0.0) {
    hi *= 2.0;
    if (++widen > 60)
      throw internal_error("legendre_psi: derivative bracket failed");
  }
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (x + log2_moment_slope(m, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  double value = std::min(x * t + log2_moment(m, t), 0.0);  // psi <= 0 always
  return {x, value, t};
}

double golden_max(double a, double b, const auto& f, double tol) {
  constexpr double kInv = 0.6180339887498949;  // 1/phi
  double x1 = b - kInv * (b - a);
  double x2 = a + kInv * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200 && (b - a) > tol; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInv * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInv * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

LegendreResult legendre_psi(const WeightModel& m, double x) {
  require_subcritical(m);
  if (!(x >= 0.0)) throw std::domain_error("legendre_psi: x must be nonnegative");
  if (x >= gamma(m)) return {x, 0.0, 0.0};  // minimizer at t = 0, empty product
  return psi_inner(m, x);
}

PhiResult phi(const WeightModel& m, double beta) {
  require_subcritical(m);
  if (!(beta >= 0.0)) throw std::domain_error("phi: beta must be nonnegative");
  double g = gamma(m);
  auto eta = [&](double x) {
    return (1.0 + legendre_psi(m, x).value) / (1.0 + x + beta);
  };

  // Coarse grid over [0, gamma] (the objective is constant-numerator and
  // decreasing beyond gamma), then a golden-section polish around the best
  // cell. Boundary maxima survive because the polished candidate only
  // replaces the grid winner when it is actually better.
  constexpr int kCells = 2048;
  double best_x = 0.0, best_v = eta(0.0);
  for (int i = 1; i <= kCells; ++i) {
    double x = g * static_cast<double>(i) / kCells;
    double v = eta(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double cell = g / kCells;
  double lo = std::max(0.0, best_x - cell);
  double hi = std::min(g, best_x + cell);
  double xr = golden_max(lo, hi, eta, 1e-12);
  double vr = eta(xr);
  if (vr > best_v) {
    best_v = vr;
    best_x = xr;
  }
  return {beta, best_v, best_x};
}

double hausdorff_image_dim(const WeightModel& m, double d) {
  require_subcritical(m);
  if (!(d >= 0.0 && d <= 1.0))
    throw std::domain_error("hausdorff_image_dim: d must lie in [0,1]");
  if (d == 0.0) return 0.0;
  if (d == 1.0) return 1.0;  // E(W) = 1 makes s = 1 exact
  // s -> s - log2 E(W^s) is strictly increasing from 0 to 1 on [0,1].
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid - log2_moment(m, mid) < d)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double lower_bound_s1(const WeightModel& m, double d) {
  require_subcritical(m);
  if (!(d >= 0.0 && d <= 1.0))
    throw std::domain_error("lower_bound_s1: d must lie in [0,1]");
  return d / (1.0 + gamma(m));
}

double sequence_image_dim(const WeightModel& m, double p) {
  require_subcritical(m);
  if (!(p > 0.0)) throw std::domain_error("sequence_image_dim: p must be positive");
  return phi(m, (1.0 + gamma(m)) * p).value;
}

double lognormal_sequence_dim_closed_form(double sigma2, double p) {
  WeightModel m = WeightModel::lognormal(sigma2);
  require_subcritical(m);
  if (!(p > 0.0))
    throw std::domain_error("lognormal_sequence_dim_closed_form: p must be positive");
  double g = gamma(m);
  double s = 1.0 + p + p * g;
  double disc = s * s + 2.0 * p * g + g * g + 2.0 * p * g * g - 2.0 * g;
  if (!(disc >= 0.0))
    throw internal_error("closed form: negative discriminant");
  double x0 = std::sqrt(disc) - s;
  if (!(x0 < g))
    throw internal_error("closed form: stationary point at or beyond gamma");
  // A nonpositive stationary point means the variational objective is
  // already decreasing at x = 0, so the supremum sits on the boundary.
  x0 = std::max(x0, 0.0);
  double psi0 = -(x0 - g) * (x0 - g) / (4.0 * g);
  return (1.0 + psi0) / (1.0 + x0 + (1.0 + g) * p);
}

double asymptotic_ratio(const WeightModel& m, double d) {
  require_subcritical(m);
  if (!(d > 0.0 && d <= 1.0))
    throw std::domain_error("asymptotic_ratio: d must lie in (0,1]");
  return hausdorff_image_dim(m, d) / lower_bound_s1(m, d);
}

std::vector<BoundsRow> bounds_table(const WeightModel& m,
                                    const std::vector<double>& p_grid) {
  require_subcritical(m);
  if (p_grid.empty()) throw std::domain_error("bounds_table: empty grid");
  std::vector<BoundsRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0)) throw std::domain_error("bounds_table: p must be positive");
    double d = 1.0 / (1.0 + p);
    rows.push_back({p, lower_bound_s1(m, d), sequence_image_dim(m, p),
                    hausdorff_image_dim(m, d)});
  }
  return rows;
}

}  // namespace cascade
