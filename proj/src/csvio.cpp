#include "cascade/csvio.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

#include "cascade/version.hpp"

namespace cascade {

std::string format_double(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

std::vector<std::string> RunManifest::comment_lines() const {
  std::vector<std::string> lines;
  lines.push_back(std::string("# command: ") + command);
  if (!model.empty()) lines.push_back(std::string("# model: ") + model);
  if (!set.empty()) lines.push_back(std::string("# set: ") + set);
  if (!seeds.empty()) lines.push_back(std::string("# seeds: ") + seeds);
  if (depth > 0) lines.push_back(std::string("# depth: ") + std::to_string(depth));
  lines.push_back(std::string("# version: ") + kToolName + " " + kToolVersion);

  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  lines.push_back(std::string("# generated: ") + stamp);
  return lines;
}

void write_manifest(std::ostream& os, const RunManifest& m) {
  for (const std::string& line : m.comment_lines()) os << line << "\n";
}

void write_count_series_csv(std::ostream& os, const CountSeries& series) {
  os << "n,count\n";
  for (auto [n, count] : series.entries) os << n << "," << count << "\n";
}

void write_dim_estimate_csv(std::ostream& os, const DimEstimate& est) {
  os << "slope,stderr,n_lo,n_hi\n";
  os << format_double(est.slope) << "," << format_double(est.stderr_) << ","
     << est.window.lo << "," << est.window.hi << "\n";
}

}  // namespace cascade
