#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bauc/bavwm.hpp"
#include "bauc/gap.hpp"
#include "bauc/harness.hpp"
#include "bauc/json_io.hpp"
#include "bauc/mechanism.hpp"

namespace {

using namespace bauc;

void printAllocation(const Allocation& alloc) {
  for (std::size_t j = 0; j < alloc.assignment.size(); ++j) {
    std::cout << "  item " << j + 1 << " -> ";
    if (alloc.assignment[j] == kUnassigned)
      std::cout << "unassigned\n";
    else
      std::cout << "agent " << alloc.assignment[j] + 1 << "\n";
  }
}

template <class R>
void printResult(const BavwmResult<R>& result) {
  std::cout << "allocation:\n";
  printAllocation(result.allocation);
  std::cout << "prices:\n";
  for (std::size_t i = 0; i < result.prices.prices.size(); ++i)
    std::cout << "  agent " << i + 1 << ": " << result.prices.prices[i] << "\n";
  std::cout << "objective: " << result.objectiveValue << "\n";
  if (result.certificate)
    std::cout << "lp-certificate: " << *result.certificate << "\n";
}

template <class R>
int runSolveBavwm(const BavwmInstance<R>& inst, const std::string& method,
                  const std::string& dumpPath, std::uint64_t sizeLimit) {
  if (!dumpPath.empty()) {
    const auto norm = normalize(inst);
    auto [lp, map] = buildRelaxation(norm);
    (void)map;
    std::ofstream out(dumpPath);
    if (!out) throw std::runtime_error("cannot write " + dumpPath);
    dumpLp(lp, out);
  }
  if (method == "exact") {
    ExactOptions opt;
    opt.sizeLimit = sizeLimit;
    printResult(solveExact(inst, opt));
  } else {
    printResult(solveApprox(inst));
  }
  return 0;
}

int runRoundGap(const GapInstance<double>& gap, bool exactArith) {
  auto report = [&](const auto& g, const auto& frac, const IntegralAssignment& rounded) {
    std::cout << "assignment:\n";
    for (int j = 0; j < g.jobs; ++j)
      std::cout << "  job " << j + 1 << " -> machine " << rounded.machineOf[j] + 1 << "\n";
    std::cout << "fractional-cost: " << fractionalCost(g, frac) << "\n";
    std::cout << "cost: " << assignmentCost(g, rounded) << "\n";
    const auto loads = machineLoads(g, rounded);
    std::cout << "loads:\n";
    for (int i = 0; i < g.machines(); ++i)
      std::cout << "  machine " << i + 1 << ": " << loads[i] << " (capacity " << g.capacities[i]
                << ")\n";
  };
  if (exactArith) {
    const auto g = detail::rationalizeGap(gap);
    const auto frac = solveGapLp(g);
    report(g, frac, stRound(g, frac));
  } else {
    const auto frac = solveGapLp(gap);
    report(gap, frac, stRound(gap, frac));
  }
  return 0;
}

int runSolveMechanism(const Prior<double>& prior, const std::string& bicMode) {
  const BicMode mode = bicMode == "budget-downward" ? BicMode::BudgetDownward : BicMode::Full;
  const auto sol = solveOptimalMechanism(prior, mode);
  std::cout << "revenue: " << sol.revenue << "\n";
  for (int i = 0; i < prior.bidderCount(); ++i)
    for (std::size_t t = 0; t < prior.bidders[i].size(); ++t) {
      std::cout << "bidder " << i + 1 << " type " << t + 1 << ": p=" << sol.interimPay[i][t]
                << " pi=[";
      for (int j = 0; j < prior.items; ++j)
        std::cout << (j ? ", " : "") << sol.interimAlloc[i][t][j];
      std::cout << "]\n";
    }
  const auto bic = checkBic(sol, prior, mode, 1e-7);
  const auto expost = checkExPost(sol, prior, 1e-7);
  std::cout << "bic-violations: " << bic.size() << "\n";
  std::cout << "expost-violations: " << expost.size() << "\n";
  return bic.empty() && expost.empty() ? 0 : 1;
}

int runRunMechanism(const Prior<double>& prior, const MappingDistribution<double>& delta,
                    std::vector<int> profile, std::uint64_t seed, const std::string& solver) {
  const Method method = solver == "exact" ? Method::Exact : Method::Approx;
  const auto [alloc, prices] = runVirtualWelfareMechanism(prior, delta, profile, seed, method);
  std::cout << "allocation:\n";
  printAllocation(alloc);
  std::cout << "prices:\n";
  for (std::size_t i = 0; i < prices.prices.size(); ++i)
    std::cout << "  bidder " << i + 1 << ": " << prices.prices[i] << "\n";
  return 0;
}

int runBench(std::uint64_t seed, int count, int nMax, int mMax, const std::string& jsonPath) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.count = count;
  cfg.agentsMax = nMax;
  cfg.itemsMax = mMax;
  const auto report = benchRatio(generateInstances(cfg), true);
  std::cout << "instances: " << report.entries.size() << " (completed " << report.completed
            << ", skipped " << report.skipped << ")\n";
  std::cout << "min-ratio: " << report.minRatio << "\n";
  std::cout << "mean-ratio: " << report.meanRatio << "\n";
  std::cout << "violations: " << report.violations << "\n";
  if (!jsonPath.empty()) writeJsonFile(jsonPath, benchReportToJson(report));
  return report.violations == 0 ? 0 : 1;
}

int runVerify(const std::string& jsonPath) {
  const auto report = verifySuite();
  for (const auto& c : report.checks)
    std::cout << (c.passed ? "PASS" : "FAIL") << " " << c.name << " (" << c.detail << ")\n";
  if (!jsonPath.empty()) writeJsonFile(jsonPath, verifyReportToJson(report));
  return report.allPassed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budget-constrained auction toolkit"};
  app.require_subcommand(1);
  std::cout << std::setprecision(12);

  std::string inPath, dumpPath, jsonPath;
  std::string method = "approx", bicMode = "full", solver = "exact";
  std::string priorPath, deltaPath;
  bool exactArith = false;
  std::uint64_t sizeLimit = 10'000'000;
  std::uint64_t seed = 1;
  std::vector<int> profile;
  int count = 100, nMax = 3, mMax = 6;

  auto* solveCmd = app.add_subcommand("solve-bavwm", "solve a BAVWM instance");
  solveCmd->add_option("--in", inPath, "instance JSON file")->required();
  solveCmd->add_option("--method", method, "exact or approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  solveCmd->add_flag("--exact-arith", exactArith, "use exact rational arithmetic");
  solveCmd->add_option("--dump-lp", dumpPath, "write the relaxation LP as text");
  solveCmd->add_option("--size-limit", sizeLimit, "exhaustive search cap on (n+1)^m");

  auto* gapCmd = app.add_subcommand("round-gap", "solve and round a GAP instance");
  gapCmd->add_option("--in", inPath, "GAP JSON file")->required();
  gapCmd->add_flag("--exact", exactArith, "use exact rational arithmetic");

  auto* mechCmd = app.add_subcommand("solve-mechanism", "revenue-optimal mechanism LP");
  mechCmd->add_option("--in", inPath, "prior JSON file")->required();
  mechCmd->add_option("--bic-mode", bicMode, "full or budget-downward")
      ->check(CLI::IsMember({"full", "budget-downward"}));

  auto* runCmd = app.add_subcommand("run-mechanism", "phase-two virtual welfare run");
  runCmd->add_option("--prior", priorPath, "prior JSON file")->required();
  runCmd->add_option("--delta", deltaPath, "mapping distribution JSON file")->required();
  runCmd->add_option("--profile", profile, "reported type index per bidder (0-based)")
      ->required()
      ->delimiter(',');
  runCmd->add_option("--seed", seed, "sampling seed");
  runCmd->add_option("--solver", solver, "exact or approx")
      ->check(CLI::IsMember({"exact", "approx"}));

  auto* benchCmd = app.add_subcommand("bench", "exact-vs-approx ratio benchmark");
  benchCmd->add_option("--seed", seed, "generator seed");
  benchCmd->add_option("--count", count, "number of instances");
  benchCmd->add_option("--n-max", nMax, "max agents");
  benchCmd->add_option("--m-max", mMax, "max items");
  benchCmd->add_option("--json", jsonPath, "write the report as JSON");

  auto* verifyCmd = app.add_subcommand("verify", "run the invariant verification suites");
  verifyCmd->add_option("--json", jsonPath, "write the report as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solveCmd) {
      const auto inst = instanceFromJson(readJsonFile(inPath));
      const auto bad = validate(inst);
      if (!bad.empty()) {
        for (const auto& v : bad) std::cerr << "invalid instance: " << v << "\n";
        return 2;
      }
      if (exactArith) return runSolveBavwm(convertInstance<Rational>(inst), method, dumpPath, sizeLimit);
      return runSolveBavwm(inst, method, dumpPath, sizeLimit);
    }
    if (*gapCmd) return runRoundGap(gapFromJson(readJsonFile(inPath)), exactArith);
    if (*mechCmd) return runSolveMechanism(priorFromJson(readJsonFile(inPath)), bicMode);
    if (*runCmd)
      return runRunMechanism(priorFromJson(readJsonFile(priorPath)),
                             deltaFromJson(readJsonFile(deltaPath)), profile, seed, solver);
    if (*benchCmd) return runBench(seed, count, nMax, mMax, jsonPath);
    if (*verifyCmd) return runVerify(jsonPath);
  } catch (const SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
