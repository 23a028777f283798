#pragma once

#include <vector>

#include "cascade/weight_model.hpp"

namespace cascade {

// Dimension formulas for images f(E) of sparse sets under a subcritical
// cascade. Everything is derived from the cumulant log2 E(W^t):
//
//   psi(x) = inf_{t>=0} ( x t + log2 E(W^t) ),            x >= 0,
//   phi(beta) = sup_{x>0} (1 + psi(x)) / (1 + x + beta),  beta >= 0,
//
// and the root equation d = s - log2 E(W^s), which maps [0,1] onto [0,1]
// and gives the exact image dimension for sets of box dimension d.
// The image dimension of the sequence set E_a with a_n = n^-p is
// phi((1 + gamma) p).

struct LegendreResult {
  double x;
  double value;        // psi(x) <= 0, equal to 0 for x >= gamma
  double minimizer_t;  // argmin, in [0,1); 0 when x >= gamma
};

struct PhiResult {
  double beta;
  double value;        // in (0, 1]
  double maximizer_x;  // in [0, gamma]
};

struct BoundsRow {
  double p;
  double s1;   // general lower bound d/(1+gamma) at d = 1/(1+p)
  double dim;  // exact sequence image dimension phi((1+gamma) p)
  double s2;   // root-equation upper bound at d = 1/(1+p)
};

LegendreResult legendre_psi(const WeightModel& m, double x);

PhiResult phi(const WeightModel& m, double beta);

// Unique s in [0,1] with s - log2 E(W^s) = d. Exact at the endpoints.
double hausdorff_image_dim(const WeightModel& m, double d);

// d / (1 + gamma).
double lower_bound_s1(const WeightModel& m, double d);

// phi((1 + gamma) p) for the power sequence a_n = n^-p.
double sequence_image_dim(const WeightModel& m, double p);

// Explicit log-normal evaluation of sequence_image_dim. The interior
// stationary point
//   x0 = sqrt((1+p+p g)^2 + 2 p g + g^2 + 2 p g^2 - 2 g) - p g - p - 1
// is used when it lands in (0, gamma); when the stationary point falls at
// or below 0 the supremum sits on the boundary x = 0 and the formula is
// evaluated there.
double lognormal_sequence_dim_closed_form(double sigma2, double p);

// hausdorff_image_dim(d) / lower_bound_s1(d); tends to 1 as d -> 0.
double asymptotic_ratio(const WeightModel& m, double d);

// One row per p: (p, s1, dim, s2) with d = 1/(1+p).
std::vector<BoundsRow> bounds_table(const WeightModel& m,
                                    const std::vector<double>& p_grid);

}  // namespace cascade
