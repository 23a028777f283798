#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cascade {

inline constexpr long long kMaxEnumeratedPoints = 1ll << 26;

// Families of compact countable sets whose box dimension is known:
//
//   power_sequence p:  {0} u { n^-p : 1 <= n <= max_index },   dim 1/(1+p)
//   thyrse alpha:      {0} u { 0.0^{k-1}1j : 1 <= k <= max_level,
//                              j in {0,1}^floor(alpha k) },    dim a/(1+a)
//   cantor ratio:      endpoints of the homogeneous Cantor construction
//                      ([0,1] split into two pieces of the given ratio,
//                      max_level times),          dim log 2 / log(1/ratio)
//   explicit_list:     caller-supplied points in [0,1]
struct PointSetSpec {
  enum class Kind { power_sequence, thyrse, cantor, explicit_list };

  Kind kind = Kind::power_sequence;
  double p = 0.0;
  double alpha = 0.0;
  double ratio = 0.0;
  long long max_index = 0;  // power sequence cutoff
  int max_level = 0;        // thyrse / cantor cutoff
  std::vector<double> points;
  std::string source;  // original spec string or file path, for manifests

  static PointSetSpec power(double p, long long max_index);
  static PointSetSpec thyrse(double alpha, int max_level);
  static PointSetSpec cantor(double ratio, int max_level);
  static PointSetSpec explicit_list(std::vector<double> points);
};

// All points of the set, strictly increasing, deduplicated, inside [0,1].
std::vector<double> enumerate_points(const PointSetSpec& spec);

// Box dimension the construction is aiming for; NaN for explicit lists.
double nominal_box_dimension(const PointSetSpec& spec);

// Decay-class estimate for a strictly decreasing positive sequence:
// -log a_n / log n at the deepest available index, plus the slope of
// log a_n against log n over the tail half as a diagnostic.
struct SpExponentEstimate {
  double value;
  double tail_slope;
};
SpExponentEstimate sp_exponent(const std::vector<double>& decreasing);

enum class Ternary { yes, no, unknown };

// Does b eventually place a term inside every gap [a_{n+1}, a_n], n >= n0?
// Returns unknown when b is not enumerated deep enough to decide.
Ternary eventually_separates(const std::vector<double>& a,
                             const std::vector<double>& b, std::size_t n0 = 1);

// Are the successive gaps a_n - a_{n+1} nonincreasing?
bool decreasing_gaps(const std::vector<double>& a);

// Set strings: "seq:p=<float>", "thyrse:alpha=<float>",
// "cantor:ratio=<float>", "file:<path>". Cutoffs are left unset (zero).
PointSetSpec parse_set_spec(const std::string& spec);

// Fill unset cutoffs so the enumeration resolves scale 2^-depth, clamped to
// the global point guard.
PointSetSpec with_auto_cutoff(PointSetSpec spec, int depth);

}  // namespace cascade
