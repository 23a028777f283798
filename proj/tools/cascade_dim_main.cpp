#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cascade/boxdim.hpp"
#include "cascade/cascade_sim.hpp"
#include "cascade/csvio.hpp"
#include "cascade/dimension_theory.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/point_sets.hpp"
#include "cascade/verify.hpp"
#include "cascade/version.hpp"
#include "cascade/weight_model.hpp"

namespace {

using namespace cascade;

SigmaConvention conv_of(const std::string& name) {
  return name == "sigma" ? SigmaConvention::sigma : SigmaConvention::sigma2;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find('-') != std::string::npos)
      throw std::invalid_argument("bad seed list '" + text + "'");
    std::size_t used = 0;
    seeds.push_back(std::stoull(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad seed list '" + text + "'");
  }
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  return seeds;
}

Window parse_window(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("window must look like <lo>:<hi>");
  std::size_t u1 = 0, u2 = 0;
  int lo = std::stoi(text.substr(0, colon), &u1);
  int hi = std::stoi(text.substr(colon + 1), &u2);
  if (u1 != colon || u2 != text.size() - colon - 1 || lo > hi)
    throw std::invalid_argument("window must look like <lo>:<hi> with lo <= hi");
  return {lo, hi};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  return out;
}

int cmd_theory_curves(const std::string& cmdline, const std::string& model_spec,
                      SigmaConvention conv, double p_min, double p_max, int steps,
                      const std::string& out_path) {
  if (!(p_min > 0.0) || !(p_max > p_min) || steps < 2)
    throw std::invalid_argument("theory-curves: need 0 < p-min < p-max and steps >= 2");
  const WeightModel model = parse_model_spec(model_spec, conv);
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i)
    grid[static_cast<std::size_t>(i)] = p_min + (p_max - p_min) * i / (steps - 1);
  const std::vector<BoundsRow> rows = bounds_table(model, grid);

  std::ofstream out = open_out(out_path);
  RunManifest man;
  man.command = cmdline;
  man.model = format_model_spec(model);
  write_manifest(out, man);
  out << "p,s1,dim,s2\n";
  for (const BoundsRow& r : rows)
    out << format_double(r.p) << "," << format_double(r.s1) << "," << format_double(r.dim)
        << "," << format_double(r.s2) << "\n";
  return 0;
}

int cmd_legendre(const std::string& cmdline, const std::string& model_spec,
                 SigmaConvention conv, double x_min, double x_max, int steps,
                 const std::string& out_path) {
  if (!(x_min >= 0.0) || !(x_max > x_min) || steps < 2)
    throw std::invalid_argument("legendre: need 0 <= x-min < x-max and steps >= 2");
  const WeightModel model = parse_model_spec(model_spec, conv);

  std::ofstream out = open_out(out_path);
  RunManifest man;
  man.command = cmdline;
  man.model = format_model_spec(model);
  write_manifest(out, man);
  out << "x,psi,t_star\n";
  for (int i = 0; i < steps; ++i) {
    const double x = x_min + (x_max - x_min) * i / (steps - 1);
    const LegendreResult lr = legendre_psi(model, x);
    out << format_double(x) << "," << format_double(lr.value) << ","
        << format_double(lr.minimizer_t) << "\n";
  }
  return 0;
}

double family_target(const WeightModel& model, const PointSetSpec& spec) {
  switch (spec.kind) {
    case PointSetSpec::Kind::power_sequence:
      return sequence_image_dim(model, spec.p);
    case PointSetSpec::Kind::thyrse:
    case PointSetSpec::Kind::cantor:
      return hausdorff_image_dim(model, nominal_box_dimension(spec));
    case PointSetSpec::Kind::explicit_list:
      break;
  }
  return std::nan("");
}

int cmd_simulate_boxdim(const std::string& cmdline, const std::string& model_spec,
                        SigmaConvention conv, const std::string& set_spec, int depth,
                        const std::string& seeds_text, int n_max,
                        const std::string& window_text, const std::string& out_path) {
  const WeightModel model = parse_model_spec(model_spec, conv);
  const PointSetSpec spec = parse_set_spec(set_spec);
  const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
  const int n = n_max > 0 ? n_max : depth - 6;
  if (n < 1) throw std::invalid_argument("simulate-boxdim: max scale must be >= 1");
  const Window window = window_text.empty() ? Window{5, n} : parse_window(window_text);
  std::vector<int> scales;
  for (int k = 1; k <= n; ++k) scales.push_back(k);

  const std::vector<DimEstimate> estimates = parallel_map(seeds, [&](std::uint64_t seed) {
    CascadeConfig cfg;
    cfg.model = model;
    cfg.seed = seed;
    cfg.trunc_depth = depth;
    return estimate_image_boxdim(cfg, spec, scales, window);
  });
  const double target = family_target(model, spec);

  RunManifest man;
  man.command = cmdline;
  man.model = format_model_spec(model);
  man.set = spec.source.empty() ? set_spec : spec.source;
  man.seeds = seeds_text;
  man.depth = depth;

  std::ofstream out = open_out(out_path);
  write_manifest(out, man);
  out << "seed,slope,stderr,n_lo,n_hi,target,warn\n";
  bool any_warn = false;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const DimEstimate& est = estimates[i];
    const bool warn = !est.warned_scales.empty();
    any_warn = any_warn || warn;
    out << seeds[i] << "," << format_double(est.slope) << "," << format_double(est.stderr_)
        << "," << est.window.lo << "," << est.window.hi << "," << format_double(target)
        << "," << (warn ? 1 : 0) << "\n";
  }
  const double mean = average_slope(estimates);
  double spread = 0.0;
  if (estimates.size() > 1) {
    double ss = 0.0;
    for (const DimEstimate& est : estimates) ss += (est.slope - mean) * (est.slope - mean);
    spread = std::sqrt(ss / (static_cast<double>(estimates.size()) - 1.0) /
                       static_cast<double>(estimates.size()));
  }
  out << "mean," << format_double(mean) << "," << format_double(spread) << "," << window.lo
      << "," << window.hi << "," << format_double(target) << "," << (any_warn ? 1 : 0)
      << "\n";

  // Per-scale counts go next to the estimate file.
  std::string scales_path = out_path;
  const auto dot = scales_path.rfind('.');
  if (dot == std::string::npos || scales_path.find('/', dot) != std::string::npos)
    scales_path += "_scales.csv";
  else
    scales_path.insert(dot, "_scales");
  std::ofstream sout = open_out(scales_path);
  write_manifest(sout, man);
  sout << "seed,n,count,warn\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const DimEstimate& est = estimates[i];
    for (auto [sn, count] : est.series.entries) {
      const bool warn = std::binary_search(est.warned_scales.begin(),
                                           est.warned_scales.end(), sn);
      sout << seeds[i] << "," << sn << "," << count << "," << (warn ? 1 : 0) << "\n";
    }
  }
  return 0;
}

int cmd_simulate_ldp(const std::string& cmdline, const std::string& model_spec,
                     SigmaConvention conv, double x, double delta, int n,
                     const std::string& seeds_text, const std::string& out_path) {
  if (n < 1) throw std::invalid_argument("simulate-ldp: n must be >= 1");
  if (n > 26) throw resource_error("simulate-ldp: n above the traversal guard of 26");
  const WeightModel model = parse_model_spec(model_spec, conv);
  const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
  const double target = 1.0 + legendre_psi(model, x).value;

  std::vector<int> levels;
  for (int k = 1; k <= n; ++k) levels.push_back(k);
  const auto counts = parallel_map(seeds, [&](std::uint64_t seed) {
    CascadeConfig cfg;
    cfg.model = model;
    cfg.seed = seed;
    cfg.trunc_depth = n;
    return count_large_product_paths_multi(cfg, levels, x, delta);
  });

  RunManifest man;
  man.command = cmdline;
  man.model = format_model_spec(model);
  man.seeds = seeds_text;
  man.depth = n;

  std::ofstream out = open_out(out_path);
  write_manifest(out, man);
  out << "n,count,log2count_over_n,target\n";
  for (int level = 1; level <= n; ++level) {
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const std::uint64_t c = counts[si][static_cast<std::size_t>(level - 1)];
      const double rate = c > 0 ? std::log2(static_cast<double>(c)) / level : -HUGE_VAL;
      out << level << "," << c << "," << format_double(rate) << "," << format_double(target)
          << "\n";
    }
  }
  return 0;
}

int cmd_verify(const std::string& out_path, const std::string& criteria_text) {
  VerifyOptions opts;
  if (const char* env = std::getenv("CASCADE_DIM_TOLERANCE_SCALE")) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used == std::strlen(env) && v >= 0.0) opts.tolerance_scale = v;
    } catch (const std::logic_error&) {
    }
  }
  if (!criteria_text.empty()) {
    std::stringstream ss(criteria_text);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (id.size() != 2 || id[0] != 'A' || id[1] < '1' || id[1] > '9')
        throw std::invalid_argument("unknown criterion id '" + id + "'");
      opts.only.push_back(id);
    }
  }

  const std::vector<CriterionResult> results = run_acceptance(opts);
  std::ostringstream table;
  int passed = 0;
  for (const CriterionResult& r : results) {
    char timing[32];
    std::snprintf(timing, sizeof timing, "%7.2f s", r.seconds);
    table << r.id << "  " << (r.pass ? "PASS" : "FAIL") << "  " << timing << "  " << r.title
          << " -- " << r.detail << "\n";
    if (r.pass) ++passed;
  }
  table << passed << "/" << results.size() << " criteria passed\n";

  std::fputs(table.str().c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream out = open_out(out_path);
    out << table.str();
  }
  return (passed == static_cast<int>(results.size()) && !results.empty()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cmdline;
  for (int i = 0; i < argc; ++i) {
    if (i) cmdline += ' ';
    cmdline += argv[i];
  }

  CLI::App app{"Subcritical multiplicative cascades: dimension formulas, simulation, "
               "box-counting estimates, and self-verification"};
  app.require_subcommand(1);
  std::string sigma_convention = "sigma2";
  app.add_option("--sigma-convention", sigma_convention,
                 "Interpret the log-normal parameter as sigma or sigma2")
      ->check(CLI::IsMember({"sigma", "sigma2"}));

  int rc = 0;

  auto* tc = app.add_subcommand("theory-curves", "Bounds table p,s1,dim,s2 over a p grid");
  tc->fallthrough();
  struct {
    std::string model, out;
    double p_min = 0.05, p_max = 5.0;
    int steps = 200;
  } tca;
  tc->add_option("--model", tca.model, "lognormal:sigma2=<v> or twopoint:xi=<v>")->required();
  tc->add_option("--p-min", tca.p_min, "Left end of the p grid");
  tc->add_option("--p-max", tca.p_max, "Right end of the p grid");
  tc->add_option("--steps", tca.steps, "Number of grid points");
  tc->add_option("--out", tca.out, "Output CSV path")->required();
  tc->callback([&] {
    rc = cmd_theory_curves(cmdline, tca.model, conv_of(sigma_convention), tca.p_min,
                           tca.p_max, tca.steps, tca.out);
  });

  auto* lg = app.add_subcommand("legendre", "Legendre transform table x,psi,t_star");
  lg->fallthrough();
  struct {
    std::string model, out;
    double x_min = 0.0, x_max = 1.0;
    int steps = 200;
  } lga;
  lg->add_option("--model", lga.model, "lognormal:sigma2=<v> or twopoint:xi=<v>")->required();
  lg->add_option("--x-min", lga.x_min, "Left end of the x grid");
  lg->add_option("--x-max", lga.x_max, "Right end of the x grid");
  lg->add_option("--steps", lga.steps, "Number of grid points");
  lg->add_option("--out", lga.out, "Output CSV path")->required();
  lg->callback([&] {
    rc = cmd_legendre(cmdline, lga.model, conv_of(sigma_convention), lga.x_min, lga.x_max,
                      lga.steps, lga.out);
  });

  auto* bx = app.add_subcommand("simulate-boxdim",
                                "Box-dimension estimates for the image of a point set");
  bx->fallthrough();
  struct {
    std::string model, set, out, seeds = "1", window;
    int depth = 18, n = 0;
    std::int64_t seed = -1;
  } bxa;
  bx->add_option("--model", bxa.model, "lognormal:sigma2=<v> or twopoint:xi=<v>")->required();
  bx->add_option("--set", bxa.set, "seq:p=<v>, thyrse:alpha=<v>, cantor:ratio=<v>, file:<path>")
      ->required();
  bx->add_option("--depth", bxa.depth, "Truncation depth K");
  bx->add_option("--seed", bxa.seed, "Single seed (shorthand for --seeds)");
  bx->add_option("--seeds", bxa.seeds, "Comma-separated seed list");
  bx->add_option("--n", bxa.n, "Largest scale exponent (default depth - 6)");
  bx->add_option("--window", bxa.window, "Regression window <lo>:<hi> (default 5:n)");
  bx->add_option("--out", bxa.out, "Output CSV path; per-scale counts go to <out>_scales")
      ->required();
  bx->callback([&] {
    const std::string seeds = bxa.seed >= 0 ? std::to_string(bxa.seed) : bxa.seeds;
    rc = cmd_simulate_boxdim(cmdline, bxa.model, conv_of(sigma_convention), bxa.set,
                             bxa.depth, seeds, bxa.n, bxa.window, bxa.out);
  });

  auto* ld = app.add_subcommand("simulate-ldp",
                                "Counts of heavy weight products level by level");
  ld->fallthrough();
  struct {
    std::string model, out, seeds = "1";
    double x = 0.0, delta = 0.05;
    int n = 18;
    std::int64_t seed = -1;
  } lda;
  ld->add_option("--model", lda.model, "lognormal:sigma2=<v> or twopoint:xi=<v>")->required();
  ld->add_option("--x", lda.x, "Decay exponent x in the threshold 2^{-(x+delta)n}")
      ->required();
  ld->add_option("--delta", lda.delta, "Slack delta in the threshold");
  ld->add_option("--n", lda.n, "Deepest level (at most 26)");
  ld->add_option("--seed", lda.seed, "Single seed (shorthand for --seeds)");
  ld->add_option("--seeds", lda.seeds, "Comma-separated seed list");
  ld->add_option("--out", lda.out, "Output CSV path")->required();
  ld->callback([&] {
    const std::string seeds = lda.seed >= 0 ? std::to_string(lda.seed) : lda.seeds;
    rc = cmd_simulate_ldp(cmdline, lda.model, conv_of(sigma_convention), lda.x, lda.delta,
                          lda.n, seeds, lda.out);
  });

  auto* vf = app.add_subcommand("verify", "Run the acceptance criteria and report pass/fail");
  struct {
    std::string out, criteria;
  } vfa;
  vf->add_option("--out", vfa.out, "Also write the report to this path");
  vf->add_option("--criteria", vfa.criteria, "Comma-separated criterion ids (default: all)");
  vf->callback([&] { rc = cmd_verify(vfa.out, vfa.criteria); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const regime_error& e) {
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 2;
  } catch (const std::length_error& e) {  // resource guards
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 3;
  } catch (const std::out_of_range& e) {  // depth guards
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", kToolName, e.what());
    return 1;
  }
  return rc;
}
