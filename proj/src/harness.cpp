#include "bauc/harness.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "bauc/gap.hpp"
#include "bauc/mechanism.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace bauc {

namespace {

// Raw-bit uniforms; distribution objects are implementation-defined and would
// break cross-platform report determinism.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double real(double lo, double hi) { return lo + (hi - lo) * real01(); }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

}  // namespace

std::vector<BavwmInstance<double>> generateInstances(const GeneratorConfig& config) {
  if (config.count < 0 || config.agentsMin < 0 || config.agentsMin > config.agentsMax ||
      config.itemsMin < 0 || config.itemsMin > config.itemsMax)
    throw std::invalid_argument("generateInstances: invalid configuration");
  Uniform rng(config.seed);
  std::vector<BavwmInstance<double>> out;
  out.reserve(config.count);
  for (int c = 0; c < config.count; ++c) {
    BavwmInstance<double> inst;
    inst.agents = rng.integer(config.agentsMin, config.agentsMax);
    inst.items = rng.integer(config.itemsMin, config.itemsMax);
    inst.values.resize(inst.agents);
    inst.virtualValues.resize(inst.agents);
    for (int i = 0; i < inst.agents; ++i) {
      for (int j = 0; j < inst.items; ++j)
        inst.values[i].push_back(rng.real(0.0, config.valueMax));
      inst.budgets.push_back(rng.real(0.0, config.budgetMax));
      inst.multipliers.push_back(rng.real(-config.multiplierMax, config.multiplierMax));
      for (int j = 0; j < inst.items; ++j)
        inst.virtualValues[i].push_back(rng.real(-config.virtualValueMax, config.virtualValueMax));
    }
    const auto bad = validate(inst);
    if (!bad.empty()) throw std::logic_error("generateInstances: " + bad.front());
    out.push_back(normalize(std::move(inst)));
  }
  return out;
}

namespace {

BenchEntry benchOne(const BavwmInstance<double>& inst) {
  BenchEntry e;
  e.agents = inst.agents;
  e.items = inst.items;
  try {
    const double t0 = now_ms();
    const auto exact = solveExact(inst);
    const double t1 = now_ms();
    const auto approx = solveApprox(inst);
    const double t2 = now_ms();
    e.exactObjective = exact.objectiveValue;
    e.approxObjective = approx.objectiveValue;
    e.lpCertificate = approx.certificate.value_or(0.0);
    e.exactMillis = t1 - t0;
    e.approxMillis = t2 - t1;
    if (std::abs(e.exactObjective) <= 1e-12)
      e.ratio = e.approxObjective >= -1e-9 ? 1.0 : 0.0;
    else
      e.ratio = e.approxObjective / e.exactObjective;
  } catch (const SizeLimitError& err) {
    e.sizeLimited = true;
    e.note = err.what();
  }
  return e;
}

}  // namespace

BenchReport benchRatio(const std::vector<BavwmInstance<double>>& instances, bool parallel) {
  BenchReport report;
  report.entries.resize(instances.size());
  const int count = static_cast<int>(instances.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int idx = 0; idx < count; ++idx) report.entries[idx] = benchOne(instances[idx]);
  (void)parallel;

  double sum = 0.0;
  bool first = true;
  for (const auto& e : report.entries) {
    if (e.sizeLimited) {
      ++report.skipped;
      continue;
    }
    ++report.completed;
    sum += e.ratio;
    if (first || e.ratio < report.minRatio) report.minRatio = e.ratio;
    first = false;
    if (e.ratio < 1.0 / 3.0 - 1e-9) ++report.violations;
  }
  if (report.completed > 0) report.meanRatio = sum / report.completed;
  return report;
}

namespace {

using Check = VerifyCheck;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// objective of the raw instance under the min-truncated formula with the
// original (unclamped) values; multipliers taken post-clamp
double rawObjective(const BavwmInstance<double>& raw, const Allocation& alloc) {
  std::vector<double> load(raw.agents, 0.0);
  double total = 0.0;
  for (int j = 0; j < raw.items; ++j) {
    const int a = alloc.assignment[j];
    if (a == kUnassigned) continue;
    load[a] += raw.values[a][j];
    total += raw.virtualValues[a][j];
  }
  for (int i = 0; i < raw.agents; ++i)
    total += std::max(raw.multipliers[i], 0.0) * std::min(load[i], raw.budgets[i]);
  return total;
}

Check clampInvariance() {
  Check c{"model.clamp-invariance", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 101;
  cfg.agentsMax = 2;
  cfg.itemsMax = 3;
  cfg.count = 30;
  cfg.valueMax = 20.0;
  cfg.budgetMax = 8.0;  // values above budgets occur often
  Uniform rng(7);
  int tested = 0;
  for (const auto& inst : generateInstances(cfg)) {
    // raw variant with values pushed above the budget
    BavwmInstance<double> raw = inst;
    raw.normalized = false;
    for (int i = 0; i < raw.agents; ++i)
      for (int j = 0; j < raw.items; ++j)
        if (rng.real01() < 0.5) raw.values[i][j] += rng.real(0.0, 10.0);
    const auto norm = normalize(raw);
    const std::uint64_t total = detail::allocationCount(raw.agents, raw.items, 1 << 20);
    std::vector<int> digits;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      detail::decodeAllocation(idx, raw.agents, raw.items, digits);
      Allocation alloc{digits};
      const double lhs = objective(norm, alloc);
      const double rhs = rawObjective(raw, alloc);
      ++tested;
      if (std::abs(lhs - rhs) > 1e-9) {
        c.passed = false;
        c.detail = "mismatch " + fmt(lhs) + " vs " + fmt(rhs);
        return c;
      }
    }
  }
  c.detail = std::to_string(tested) + " allocations checked";
  return c;
}

Check normalizeIdempotent() {
  Check c{"model.normalize-idempotent", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 102;
  cfg.count = 25;
  for (const auto& inst : generateInstances(cfg)) {
    const auto again = normalize(inst);
    if (again.values != inst.values || again.multipliers != inst.multipliers ||
        again.budgets != inst.budgets || !again.normalized) {
      c.passed = false;
      c.detail = "normalize changed an already-normalized instance";
      return c;
    }
  }
  c.detail = "25 instances";
  return c;
}

Check priceFeasibility() {
  Check c{"model.price-feasibility", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 103;
  cfg.count = 40;
  Uniform rng(11);
  int tested = 0;
  for (const auto& inst : generateInstances(cfg)) {
    std::vector<int> digits(inst.items);
    for (int rep = 0; rep < 5; ++rep) {
      for (int j = 0; j < inst.items; ++j) digits[j] = rng.integer(-1, inst.agents - 1);
      Allocation alloc{digits};
      const auto prices = pricesFromAllocation(inst, alloc);
      const auto load = bundleValues(inst, alloc);
      for (int i = 0; i < inst.agents; ++i) {
        ++tested;
        if (prices.prices[i] < 0.0 || prices.prices[i] > inst.budgets[i] + 1e-9 ||
            prices.prices[i] > load[i] + 1e-9) {
          c.passed = false;
          c.detail = "price bound violated";
          return c;
        }
      }
    }
  }
  c.detail = std::to_string(tested) + " prices checked";
  return c;
}

Check roundingBounds() {
  Check c{"gap.rounding-bounds", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 104;
  cfg.count = 30;
  cfg.itemsMax = 5;
  int tested = 0;
  for (const auto& inst : generateInstances(cfg)) {
    auto [gap, map] = buildGapFromBavwm(inst);
    (void)map;
    const auto frac = solveGapLp(gap);
    const auto rounded = stRound(gap, frac);
    const auto loads = machineLoads(gap, rounded);
    for (int i = 0; i < gap.machines(); ++i)
      if (loads[i] > 2.0 * gap.capacities[i] + 1e-9) {
        c.passed = false;
        c.detail = "load bound violated on machine " + std::to_string(i + 1);
        return c;
      }
    if (assignmentCost(gap, rounded) < fractionalCost(gap, frac) - 1e-9) {
      c.passed = false;
      c.detail = "rounded cost below fractional cost";
      return c;
    }
    ++tested;
  }
  c.detail = std::to_string(tested) + " instances";
  return c;
}

Check tripartitionBounds() {
  Check c{"bavwm.tripartition-bounds", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 105;
  cfg.count = 40;
  for (const auto& inst : generateInstances(cfg)) {
    ApproxTrace<double> trace;
    solveApprox(inst, &trace);
    for (int i = 0; i < inst.agents; ++i)
      for (int k = 0; k < 3; ++k)
        if (trace.tripartition.binLoads[i][k] > inst.budgets[i] + 1e-9) {
          c.passed = false;
          c.detail = "bin load above budget";
          return c;
        }
    if (trace.selectedObjective < trace.roundedObjective / 3.0 - 1e-9) {
      c.passed = false;
      c.detail = "selected split below a third of the rounded split";
      return c;
    }
  }
  c.detail = "40 pipeline runs";
  return c;
}

Check ratioGuarantee() {
  Check c{"bavwm.ratio-guarantee", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 106;
  cfg.count = 60;
  const auto report = benchRatio(generateInstances(cfg), true);
  if (report.violations > 0 || report.skipped > 0) {
    c.passed = false;
    c.detail = std::to_string(report.violations) + " ratio violations";
    return c;
  }
  // certificate soundness: LP optimum upper-bounds the integral optimum
  for (const auto& e : report.entries)
    if (e.lpCertificate < e.exactObjective - 1e-9) {
      c.passed = false;
      c.detail = "LP certificate below exact optimum";
      return c;
    }
  c.detail = "min ratio " + fmt(report.minRatio) + " over 60 instances";
  return c;
}

Check lpModesAgree() {
  Check c{"lp.modes-agree", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 107;
  cfg.count = 12;
  cfg.agentsMax = 2;
  cfg.itemsMax = 4;
  for (const auto& inst : generateInstances(cfg)) {
    auto [lpF, mapF] = buildRelaxation(inst);
    (void)mapF;
    const auto solF = solveLp(lpF);
    const auto exactInst = convertInstance<Rational>(inst);
    auto [lpE, mapE] = buildRelaxation(exactInst);
    (void)mapE;
    const auto solE = solveLp(lpE);
    if (solF.status != LpStatus::Optimal || solE.status != LpStatus::Optimal ||
        std::abs(solF.objectiveValue - solE.objectiveValue.get_d()) > 1e-6) {
      c.passed = false;
      c.detail = "float/exact objective mismatch";
      return c;
    }
    if (tightCount(lpE, solE.values) < lpE.numVars) {
      c.passed = false;
      c.detail = "exact solution is not a vertex";
      return c;
    }
  }
  c.detail = "12 relaxations solved in both modes";
  return c;
}

Prior<double> randomPrior(Uniform& rng, int maxBidders, int maxTypes, int items) {
  Prior<double> prior;
  prior.items = items;
  const int n = rng.integer(1, maxBidders);
  for (int i = 0; i < n; ++i) {
    const int types = rng.integer(1, maxTypes);
    std::vector<int> weights(types);
    int total = 0;
    for (int& w : weights) {
      w = rng.integer(1, 4);
      total += w;
    }
    std::vector<BidderType<double>> list;
    for (int t = 0; t < types; ++t) {
      BidderType<double> ty;
      for (int j = 0; j < items; ++j) ty.values.push_back(rng.real(0.0, 8.0));
      ty.budget = rng.real(0.0, 8.0);
      ty.probability = static_cast<double>(weights[t]) / total;
      list.push_back(std::move(ty));
    }
    prior.bidders.push_back(std::move(list));
  }
  return prior;
}

Check mechanismChecks() {
  Check c{"mechanism.lp-checks", true, ""};
  Uniform rng(108);
  for (int rep = 0; rep < 6; ++rep) {
    const auto prior = randomPrior(rng, 2, 2, rep % 2 + 1);
    const auto full = solveOptimalMechanism(prior, BicMode::Full);
    const auto down = solveOptimalMechanism(prior, BicMode::BudgetDownward);
    if (!checkBic(full, prior, BicMode::Full, 1e-7).empty() ||
        !checkExPost(full, prior, 1e-7).empty() ||
        !checkBic(down, prior, BicMode::BudgetDownward, 1e-7).empty() ||
        !checkExPost(down, prior, 1e-7).empty()) {
      c.passed = false;
      c.detail = "LP output failed a constraint checker";
      return c;
    }
    if (down.revenue < full.revenue - 1e-9) {
      c.passed = false;
      c.detail = "budget-downward revenue below full-BIC revenue";
      return c;
    }
  }
  c.detail = "6 priors, both BIC modes";
  return c;
}

Check generatorDeterminism() {
  Check c{"harness.generator-determinism", true, ""};
  GeneratorConfig cfg;
  cfg.seed = 109;
  cfg.count = 10;
  const auto a = generateInstances(cfg);
  const auto b = generateInstances(cfg);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].values != b[i].values || a[i].budgets != b[i].budgets ||
        a[i].multipliers != b[i].multipliers || a[i].virtualValues != b[i].virtualValues) {
      c.passed = false;
      c.detail = "same seed produced different instances";
      return c;
    }
  c.detail = "10 instances reproduced";
  return c;
}

}  // namespace

VerifyReport verifySuite() {
  VerifyReport report;
  report.checks.push_back(clampInvariance());
  report.checks.push_back(normalizeIdempotent());
  report.checks.push_back(priceFeasibility());
  report.checks.push_back(roundingBounds());
  report.checks.push_back(tripartitionBounds());
  report.checks.push_back(ratioGuarantee());
  report.checks.push_back(lpModesAgree());
  report.checks.push_back(mechanismChecks());
  report.checks.push_back(generatorDeterminism());
  report.allPassed = true;
  for (const auto& c : report.checks) report.allPassed = report.allPassed && c.passed;
  return report;
}

}  // namespace bauc
