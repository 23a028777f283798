#pragma once

#include <string>
#include <vector>

namespace cascade {

// Self-check suite for the whole artifact: closed forms against the
// variational formula, the root equation, bound ordering, asymptotics,
// deterministic and Monte Carlo box counting, large-deviation counts, and
// simulator soundness. Each criterion carries its tolerances and runtime
// budget; tolerances can be scaled (a test hook) which makes genuine
// failures reproducible on demand.

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  double tolerance_scale = 1.0;
  std::vector<std::string> only;  // criterion ids; empty means all
};

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {});

}  // namespace cascade
