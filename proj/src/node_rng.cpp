#include "cascade/node_rng.hpp"

#include <cmath>
#include <numbers>

namespace cascade {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

constexpr std::uint64_t kSkeinParity = 0x1BD11BDAA9FC1A22ull;

}  // namespace

U64x2 threefry2x64(U64x2 ctr, U64x2 key) {
  static constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
  const std::uint64_t ks[3] = {key.v0, key.v1, kSkeinParity ^ key.v0 ^ key.v1};
  std::uint64_t x0 = ctr.v0 + ks[0];
  std::uint64_t x1 = ctr.v1 + ks[1];
  for (int round = 0; round < 20; ++round) {
    x0 += x1;
    x1 = rotl64(x1, kRot[round % 8]);
    x1 ^= x0;
    if ((round & 3) == 3) {
      std::uint64_t s = static_cast<std::uint64_t>(round >> 2) + 1;  // 1..5
      x0 += ks[s % 3];
      x1 += ks[(s + 1) % 3] + s;
    }
  }
  return {x0, x1};
}

double node_uniform(U64x2 hash) {
  // Top 53 bits, centered in its cell: never exactly 0 or 1.
  return (static_cast<double>(hash.v0 >> 11) + 0.5) * 0x1p-53;
}

double standard_normal_quantile(double p) {
  // Rational initial guess (Acklam's coefficients), then two Halley
  // corrections through erfc. The corrections dominate the final accuracy.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  constexpr double kSqrt2Pi = 2.5066282746310002;
  for (int i = 0; i < 2; ++i) {
    double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace cascade
