#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bauc/bavwm.hpp"
#include "bauc/model.hpp"

namespace bauc {

/// Seeded random-instance generator configuration. Draws are raw
/// mt19937_64-derived uniforms, so identical configs reproduce bit-identical
/// instances on any platform.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  int agentsMin = 1, agentsMax = 3;
  int itemsMin = 1, itemsMax = 6;
  double valueMax = 10.0;
  double budgetMax = 10.0;
  double multiplierMax = 2.0;      // uniform in [-multiplierMax, multiplierMax], pre-normalization
  double virtualValueMax = 5.0;    // uniform in [-virtualValueMax, virtualValueMax]
  int count = 100;
};

std::vector<BavwmInstance<double>> generateInstances(const GeneratorConfig& config);

struct BenchEntry {
  int agents = 0, items = 0;
  double exactObjective = 0.0;
  double approxObjective = 0.0;
  double ratio = 0.0;
  double lpCertificate = 0.0;
  double exactMillis = 0.0;
  double approxMillis = 0.0;
  bool sizeLimited = false;
  std::string note;
};

struct BenchReport {
  std::vector<BenchEntry> entries;
  int completed = 0;
  int skipped = 0;
  int violations = 0;  // entries with ratio < 1/3 - 1e-9
  double minRatio = 0.0;
  double meanRatio = 0.0;
};

/// Runs both solvers on every instance and checks the 3-approximation
/// guarantee; instances over the exhaustive size cap are skipped with a note.
/// Entries may be computed in parallel; the report is index-ordered and
/// independent of the thread count (timing fields aside).
BenchReport benchRatio(const std::vector<BavwmInstance<double>>& instances, bool parallel = true);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool allPassed = false;
};

/// Executes the module invariant suites (clamp invariance, rounding bounds,
/// tripartition bounds, mechanism BIC/ex-post checks) on seeded inputs.
VerifyReport verifySuite();

}  // namespace bauc
