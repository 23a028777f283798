#include "cascade/weight_model.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "cascade/errors.hpp"
#include "cascade/node_rng.hpp"

namespace cascade {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kCriticalSlack = 1e-12;

void validate(const WeightModel& m) {
  if (m.kind == WeightKind::log_normal) {
    if (!(m.sigma2 > 0.0) || !std::isfinite(m.sigma2))
      throw std::invalid_argument("log-normal weights need sigma2 > 0");
  } else {
    if (!(m.xi > 0.0 && m.xi < 1.0))
      throw std::invalid_argument("two-point weights need 0 < xi < 1");
  }
}

U64x2 node_hash(std::uint64_t seed, std::uint64_t level, std::uint64_t word_lo,
                std::uint64_t word_hi) {
  return threefry2x64({word_lo, word_hi}, {seed, level});
}

double log2_weight_from_hash(const WeightModel& m, U64x2 h) {
  if (m.kind == WeightKind::log_normal) {
    double z = standard_normal_quantile(node_uniform(h));
    double sigma = std::sqrt(m.sigma2);
    return (-0.5 * m.sigma2 + sigma * z) / kLn2;  // log2 of exp(mu + sigma z)
  }
  double w = (h.v0 >> 63) ? 1.0 + m.xi : 1.0 - m.xi;
  return std::log2(w);
}

}  // namespace

WeightModel WeightModel::lognormal(double sigma2) {
  WeightModel m{WeightKind::log_normal, sigma2, 0.0};
  validate(m);
  return m;
}

WeightModel WeightModel::twopoint(double xi) {
  WeightModel m{WeightKind::two_point, 0.0, xi};
  validate(m);
  return m;
}

double log2_moment(const WeightModel& m, double t) {
  validate(m);
  if (!(t >= 0.0))
    throw std::domain_error("log2_moment: t must be nonnegative");
  if (m.kind == WeightKind::log_normal)
    return m.sigma2 * t * (t - 1.0) / (2.0 * kLn2);
  // log2((a^t + b^t)/2) written against the larger branch so it stays
  // finite for any t.
  double a = 1.0 - m.xi, b = 1.0 + m.xi;
  double ratio_t = std::pow(a / b, t);
  return t * std::log2(b) + std::log2((1.0 + ratio_t) / 2.0);
}

double log2_moment_slope(const WeightModel& m, double t) {
  validate(m);
  if (!(t >= 0.0))
    throw std::domain_error("log2_moment_slope: t must be nonnegative");
  if (m.kind == WeightKind::log_normal)
    return gamma(m) * (2.0 * t - 1.0);
  double a = 1.0 - m.xi, b = 1.0 + m.xi;
  double ratio_t = std::pow(a / b, t);
  return (ratio_t * std::log(a) + std::log(b)) / ((ratio_t + 1.0) * kLn2);
}

double gamma(const WeightModel& m) {
  validate(m);
  if (m.kind == WeightKind::log_normal) return m.sigma2 / (2.0 * kLn2);
  return -0.5 * std::log2((1.0 - m.xi) * (1.0 + m.xi));
}

RegimeReport classify_regime(const WeightModel& m) {
  validate(m);
  double w_logw;
  if (m.kind == WeightKind::log_normal) {
    w_logw = m.sigma2 / (2.0 * kLn2);
  } else {
    double a = 1.0 - m.xi, b = 1.0 + m.xi;
    w_logw = 0.5 * (a * std::log2(a) + b * std::log2(b));
  }
  Regime regime;
  if (std::fabs(w_logw - 1.0) <= kCriticalSlack)
    regime = Regime::critical;
  else
    regime = w_logw < 1.0 ? Regime::subcritical : Regime::supercritical;
  return {regime, w_logw, gamma(m)};
}

bool is_subcritical(const WeightModel& m) {
  return classify_regime(m).regime == Regime::subcritical;
}

void require_subcritical(const WeightModel& m) {
  if (!is_subcritical(m))
    throw regime_error("weight model is not subcritical: E(W log2 W) >= 1");
}

double sample_weight(const WeightModel& m, std::uint64_t seed, const DyadicPath& path) {
  validate(m);
  if (path.empty())
    throw std::domain_error("sample_weight: the root carries no weight");
  U64x2 h = node_hash(seed, static_cast<std::uint64_t>(path.length()),
                      path.value_lo(), path.value_hi());
  if (m.kind == WeightKind::two_point)
    return (h.v0 >> 63) ? 1.0 + m.xi : 1.0 - m.xi;  // exact support values
  return std::exp2(log2_weight_from_hash(m, h));
}

double sample_log2_weight(const WeightModel& m, std::uint64_t seed,
                          const DyadicPath& path) {
  validate(m);
  if (path.empty())
    throw std::domain_error("sample_log2_weight: the root carries no weight");
  return log2_weight_from_hash(
      m, node_hash(seed, static_cast<std::uint64_t>(path.length()),
                   path.value_lo(), path.value_hi()));
}

double sample_log2_weight(const WeightModel& m, std::uint64_t seed, int level,
                          std::uint64_t word) {
  if (level < 1) throw std::domain_error("sample_log2_weight: level must be >= 1");
  return log2_weight_from_hash(
      m, node_hash(seed, static_cast<std::uint64_t>(level), word, 0));
}

WeightModel parse_model_spec(const std::string& spec, SigmaConvention conv) {
  auto bad = [&](const char* why) {
    throw std::invalid_argument(std::string("bad model spec '") + spec + "': " + why);
  };
  auto colon = spec.find(':');
  if (colon == std::string::npos) bad("expected '<family>:<param>=<value>'");
  std::string family = spec.substr(0, colon);
  std::string rest = spec.substr(colon + 1);
  auto eq = rest.find('=');
  if (eq == std::string::npos) bad("expected '<param>=<value>'");
  std::string param = rest.substr(0, eq);
  double value;
  try {
    std::size_t used = 0;
    value = std::stod(rest.substr(eq + 1), &used);
    if (used != rest.size() - eq - 1) bad("trailing characters after value");
  } catch (const std::logic_error&) {
    bad("unparsable value");
    return {};  // unreachable
  }

  if (family == "lognormal") {
    if (param != "sigma2") bad("log-normal parameter must be 'sigma2'");
    double sigma2 = conv == SigmaConvention::sigma ? value * value : value;
    return WeightModel::lognormal(sigma2);
  }
  if (family == "twopoint") {
    if (param != "xi") bad("two-point parameter must be 'xi'");
    return WeightModel::twopoint(value);
  }
  bad("unknown family (want 'lognormal' or 'twopoint')");
  return {};  // unreachable
}

std::string format_model_spec(const WeightModel& m) {
  char buf[64];
  if (m.kind == WeightKind::log_normal)
    std::snprintf(buf, sizeof buf, "lognormal:sigma2=%.17g", m.sigma2);
  else
    std::snprintf(buf, sizeof buf, "twopoint:xi=%.17g", m.xi);
  return buf;
}

}  // namespace cascade
