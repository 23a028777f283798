#include "cascade/point_sets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

void check_unit_interval(const std::vector<double>& pts) {
  for (double x : pts)
    if (!(x >= 0.0 && x <= 1.0) || !std::isfinite(x))
      throw std::domain_error("point set: points must lie in [0,1]");
}

std::vector<double> enumerate_power(double p, long long max_index) {
  if (!(p > 0.0)) throw std::domain_error("power sequence: p must be positive");
  if (max_index < 1) throw shape_error("power sequence: cutoff must be >= 1");
  if (max_index + 1 > kMaxEnumeratedPoints)
    throw resource_error("power sequence: cutoff exceeds the point guard");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(max_index) + 1);
  pts.push_back(0.0);
  for (long long n = max_index; n >= 1; --n)
    pts.push_back(std::pow(static_cast<double>(n), -p));
  return pts;
}

std::vector<double> enumerate_thyrse(double alpha, int max_level) {
  if (!(alpha > 0.0)) throw std::domain_error("thyrse: alpha must be positive");
  if (max_level < 1) throw shape_error("thyrse: cutoff must be >= 1");
  long long total = 1;
  for (int k = 1; k <= max_level; ++k) {
    int m = static_cast<int>(std::floor(alpha * k));
    if (k + m > 52)
      throw resource_error("thyrse: cluster bits exceed exact double range");
    total += 1ll << m;
    if (total > kMaxEnumeratedPoints)
      throw resource_error("thyrse: enumeration exceeds the point guard");
  }
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(total));
  pts.push_back(0.0);
  // Level-k block: stem 2^-k followed by every cluster suffix. Deeper
  // blocks sit wholly to the left of shallower ones, so build from the
  // deepest level up to get ascending order for free.
  for (int k = max_level; k >= 1; --k) {
    int m = static_cast<int>(std::floor(alpha * k));
    double stem = std::ldexp(1.0, -k);
    double unit = std::ldexp(1.0, -(k + m));
    for (std::uint64_t j = 0; j < (1ull << m); ++j)
      pts.push_back(stem + static_cast<double>(j) * unit);
  }
  return pts;
}

std::vector<double> enumerate_cantor(double ratio, int max_level) {
  if (!(ratio > 0.0 && ratio <= 0.5))
    throw std::domain_error("cantor: ratio must lie in (0, 1/2]");
  if (max_level < 0) throw shape_error("cantor: level must be >= 0");
  if (max_level >= 25 || (2ll << max_level) > kMaxEnumeratedPoints)
    throw resource_error("cantor: enumeration exceeds the point guard");
  std::vector<std::pair<double, double>> intervals = {{0.0, 1.0}};
  for (int k = 0; k < max_level; ++k) {
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (auto [a, b] : intervals) {
      double w = (b - a) * ratio;
      next.push_back({a, a + w});
      next.push_back({b - w, b});
    }
    intervals = std::move(next);
  }
  std::vector<double> pts;
  pts.reserve(intervals.size() * 2);
  for (auto [a, b] : intervals) {
    pts.push_back(a);
    pts.push_back(b);
  }
  return pts;
}

}  // namespace

PointSetSpec PointSetSpec::power(double p, long long max_index) {
  PointSetSpec s;
  s.kind = Kind::power_sequence;
  s.p = p;
  s.max_index = max_index;
  return s;
}

PointSetSpec PointSetSpec::thyrse(double alpha, int max_level) {
  PointSetSpec s;
  s.kind = Kind::thyrse;
  s.alpha = alpha;
  s.max_level = max_level;
  return s;
}

PointSetSpec PointSetSpec::cantor(double ratio, int max_level) {
  PointSetSpec s;
  s.kind = Kind::cantor;
  s.ratio = ratio;
  s.max_level = max_level;
  return s;
}

PointSetSpec PointSetSpec::explicit_list(std::vector<double> points) {
  PointSetSpec s;
  s.kind = Kind::explicit_list;
  s.points = std::move(points);
  return s;
}

std::vector<double> enumerate_points(const PointSetSpec& spec) {
  std::vector<double> pts;
  switch (spec.kind) {
    case PointSetSpec::Kind::power_sequence:
      pts = enumerate_power(spec.p, spec.max_index);
      break;
    case PointSetSpec::Kind::thyrse:
      pts = enumerate_thyrse(spec.alpha, spec.max_level);
      break;
    case PointSetSpec::Kind::cantor:
      pts = enumerate_cantor(spec.ratio, spec.max_level);
      break;
    case PointSetSpec::Kind::explicit_list:
      pts = spec.points;
      break;
  }
  if (pts.empty()) throw shape_error("point set: empty enumeration");
  check_unit_interval(pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (static_cast<long long>(pts.size()) > kMaxEnumeratedPoints)
    throw resource_error("point set: enumeration exceeds the point guard");
  return pts;
}

double nominal_box_dimension(const PointSetSpec& spec) {
  switch (spec.kind) {
    case PointSetSpec::Kind::power_sequence:
      return 1.0 / (1.0 + spec.p);
    case PointSetSpec::Kind::thyrse:
      return spec.alpha / (1.0 + spec.alpha);
    case PointSetSpec::Kind::cantor:
      return std::log(2.0) / std::log(1.0 / spec.ratio);
    case PointSetSpec::Kind::explicit_list:
      break;
  }
  return std::nan("");
}

SpExponentEstimate sp_exponent(const std::vector<double>& a) {
  if (a.size() < 16) throw shape_error("sp_exponent: need at least 16 terms");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0)) throw shape_error("sp_exponent: terms must be positive");
    if (i > 0 && !(a[i] < a[i - 1]))
      throw shape_error("sp_exponent: sequence must be strictly decreasing");
  }
  std::size_t n = a.size();       // 1-based index of the last term
  std::size_t half = n / 2;
  double value = -std::log(a[n - 1]) / std::log(static_cast<double>(n));
  double tail_slope = -(std::log(a[n - 1]) - std::log(a[half - 1])) /
                      (std::log(static_cast<double>(n)) - std::log(static_cast<double>(half)));
  return {value, tail_slope};
}

Ternary eventually_separates(const std::vector<double>& a,
                             const std::vector<double>& b, std::size_t n0) {
  auto check_decreasing = [](const std::vector<double>& s, const char* name) {
    if (s.size() < 2) throw shape_error("eventually_separates: sequence too short");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] > 0.0))
        throw shape_error(std::string("eventually_separates: ") + name +
                          " must be positive");
      if (i > 0 && !(s[i] < s[i - 1]))
        throw shape_error(std::string("eventually_separates: ") + name +
                          " must be strictly decreasing");
    }
  };
  check_decreasing(a, "a");
  check_decreasing(b, "b");
  if (n0 < 1) throw shape_error("eventually_separates: n0 must be >= 1");
  if (n0 >= a.size()) return Ternary::unknown;  // no gap to inspect

  for (std::size_t n = n0; n + 1 <= a.size(); ++n) {
    double hi = a[n - 1], lo = a[n];  // gap [a_{n+1}, a_n], 1-based
    // b is strictly decreasing: first element <= hi.
    auto it = std::lower_bound(b.begin(), b.end(), hi,
                               [](double v, double bound) { return v > bound; });
    if (it == b.end()) return Ternary::unknown;  // b not enumerated this deep
    if (*it < lo) return Ternary::no;            // b jumps clean over the gap
  }
  return Ternary::yes;
}

bool decreasing_gaps(const std::vector<double>& a) {
  if (a.size() < 3) throw shape_error("decreasing_gaps: need at least 3 terms");
  for (std::size_t i = 0; i + 2 < a.size(); ++i) {
    double g0 = a[i] - a[i + 1];
    double g1 = a[i + 1] - a[i + 2];
    if (g1 > g0) return false;
  }
  return true;
}

PointSetSpec parse_set_spec(const std::string& spec) {
  auto bad = [&](const char* why) {
    throw std::invalid_argument(std::string("bad set spec '") + spec + "': " + why);
  };
  auto colon = spec.find(':');
  if (colon == std::string::npos) bad("expected '<kind>:<arg>'");
  std::string kind = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);

  if (kind == "file") {
    std::ifstream in(rest);
    if (!in) bad("cannot open points file");
    std::vector<double> pts;
    double v;
    while (in >> v) pts.push_back(v);
    PointSetSpec s = PointSetSpec::explicit_list(std::move(pts));
    s.source = spec;
    return s;
  }

  auto eq = rest.find('=');
  if (eq == std::string::npos) bad("expected '<param>=<value>'");
  std::string param = rest.substr(0, eq);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(rest.substr(eq + 1), &used);
    if (used != rest.size() - eq - 1) bad("trailing characters after value");
  } catch (const std::logic_error&) {
    bad("unparsable value");
  }

  PointSetSpec s;
  if (kind == "seq" && param == "p")
    s = PointSetSpec::power(value, 0);
  else if (kind == "thyrse" && param == "alpha")
    s = PointSetSpec::thyrse(value, 0);
  else if (kind == "cantor" && param == "ratio")
    s = PointSetSpec::cantor(value, 0);
  else
    bad("unknown kind/parameter (want seq:p, thyrse:alpha, cantor:ratio, file:)");
  s.source = spec;
  return s;
}

PointSetSpec with_auto_cutoff(PointSetSpec spec, int depth) {
  if (depth < 1 || depth > 60)
    throw depth_error("with_auto_cutoff: depth must lie in [1, 60]");
  switch (spec.kind) {
    case PointSetSpec::Kind::power_sequence:
      if (spec.max_index == 0) {
        // Enumerate until a_n < 2^-depth, i.e. n > 2^(depth/p).
        double n = std::ceil(std::exp2(static_cast<double>(depth) / spec.p));
        spec.max_index = n >= static_cast<double>(kMaxEnumeratedPoints)
                             ? kMaxEnumeratedPoints - 1
                             : static_cast<long long>(n);
      }
      break;
    case PointSetSpec::Kind::thyrse:
      if (spec.max_level == 0) {
        // Stems below the resolved scale add nothing; also respect the
        // exact-double and point-count guards.
        long long total = 1;
        int k = 0;
        while (k < depth) {
          int m = static_cast<int>(std::floor(spec.alpha * (k + 1)));
          if ((k + 1) + m > 52) break;
          long long add = 1ll << m;
          if (total + add > kMaxEnumeratedPoints) break;
          total += add;
          ++k;
        }
        if (k < 1) throw resource_error("thyrse: no admissible cutoff");
        spec.max_level = k;
      }
      break;
    case PointSetSpec::Kind::cantor:
      if (spec.max_level == 0) {
        // Interval length ratio^L below 2^-depth.
        int level = static_cast<int>(std::ceil(
            static_cast<double>(depth) * std::log(2.0) / std::log(1.0 / spec.ratio)));
        spec.max_level = std::min(level + 1, 24);
      }
      break;
    case PointSetSpec::Kind::explicit_list:
      break;
  }
  return spec;
}

}  // namespace cascade
