// Benchmark of the OpenMP kernels against their serial reference
// implementations: exhaustive allocation search and the batch ratio harness.

#include <cstdint>
#include <iomanip>
#include <iostream>

#include <omp.h>

#include "bauc/bavwm.hpp"
#include "bauc/harness.hpp"

using namespace bauc;

namespace {

BavwmInstance<double> makeInstance(int agents, int items, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.agentsMin = cfg.agentsMax = agents;
  cfg.itemsMin = cfg.itemsMax = items;
  cfg.count = 1;
  return generateInstances(cfg).front();
}

}  // namespace

int main() {
  std::cout << "threads: " << omp_get_max_threads() << "\n\n";
  std::cout << "exhaustive search kernel (serial reference vs OpenMP)\n";
  std::cout << std::left << std::setw(10) << "n x m" << std::setw(14) << "allocations"
            << std::setw(12) << "serial ms" << std::setw(12) << "omp ms" << std::setw(10)
            << "speedup" << "match\n";

  const int shapes[][2] = {{2, 8}, {3, 7}, {3, 8}, {2, 12}, {3, 9}};
  for (const auto& shape : shapes) {
    const int n = shape[0], m = shape[1];
    const auto inst = makeInstance(n, m, 1000 + n * 100 + m);
    ExactOptions serialOpt{100'000'000, false};
    ExactOptions parallelOpt{100'000'000, true};

    const double t0 = omp_get_wtime();
    const auto serial = solveExactSerial(inst, serialOpt);
    const double t1 = omp_get_wtime();
    const auto parallel = solveExact(inst, parallelOpt);
    const double t2 = omp_get_wtime();

    const bool match = serial.allocation.assignment == parallel.allocation.assignment &&
                       serial.objectiveValue == parallel.objectiveValue;
    std::uint64_t count = 1;
    for (int j = 0; j < m; ++j) count *= n + 1;
    std::cout << std::setw(10) << (std::to_string(n) + " x " + std::to_string(m))
              << std::setw(14) << count << std::setw(12) << (t1 - t0) * 1e3 << std::setw(12)
              << (t2 - t1) * 1e3 << std::setw(10)
              << (t2 - t1 > 0 ? (t1 - t0) / (t2 - t1) : 0.0) << (match ? "yes" : "NO") << "\n";
    if (!match) return 1;
  }

  std::cout << "\nbatch ratio harness (serial vs OpenMP over instances)\n";
  GeneratorConfig cfg;
  cfg.seed = 77;
  cfg.count = 150;
  const auto instances = generateInstances(cfg);
  const double b0 = omp_get_wtime();
  const auto serialReport = benchRatio(instances, false);
  const double b1 = omp_get_wtime();
  const auto parallelReport = benchRatio(instances, true);
  const double b2 = omp_get_wtime();
  bool same = serialReport.entries.size() == parallelReport.entries.size() &&
              serialReport.minRatio == parallelReport.minRatio &&
              serialReport.violations == parallelReport.violations;
  for (std::size_t i = 0; same && i < serialReport.entries.size(); ++i)
    same = serialReport.entries[i].exactObjective == parallelReport.entries[i].exactObjective &&
           serialReport.entries[i].approxObjective == parallelReport.entries[i].approxObjective;
  std::cout << "serial ms: " << (b1 - b0) * 1e3 << "\n";
  std::cout << "omp ms:    " << (b2 - b1) * 1e3 << "\n";
  std::cout << "speedup:   " << (b2 - b1 > 0 ? (b1 - b0) / (b2 - b1) : 0.0) << "\n";
  std::cout << "reports match: " << (same ? "yes" : "NO") << "\n";
  return same ? 0 : 1;
}
