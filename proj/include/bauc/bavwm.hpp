#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bauc/gap.hpp"
#include "bauc/lp.hpp"
#include "bauc/model.hpp"
#include "bauc/numeric.hpp"

namespace bauc {

enum class Method { Exact, Approx };

template <class R>
struct BavwmResult {
  Allocation allocation;
  PriceVector<R> prices;
  R objectiveValue{};
  Method method = Method::Exact;
  std::optional<R> certificate;  // LP relaxation optimum (upper bound on OPT)
};

/// LP column indices of the relaxation variables.
struct RelaxationVarMap {
  std::vector<std::vector<int>> bar;  // agents x items
  std::vector<std::vector<int>> hat;
};

/// Fractional relaxation: variables xbar/xhat in [0,1], one once-per-item row
/// and one per-agent budget row over the bar variables.
template <class R>
std::pair<LinearProgram<R>, RelaxationVarMap> buildRelaxation(const BavwmInstance<R>& inst) {
  detail::requireNormalized(inst, "buildRelaxation");
  const int n = inst.agents, m = inst.items;
  LinearProgram<R> lp;
  RelaxationVarMap map;
  map.bar.assign(n, std::vector<int>(m, -1));
  map.hat.assign(n, std::vector<int>(m, -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      map.bar[i][j] =
          lp.addVar(R(0), R(1), inst.multipliers[i] * inst.values[i][j] + inst.virtualValues[i][j],
                    "xbar_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      map.hat[i][j] = lp.addVar(R(0), R(1), inst.virtualValues[i][j],
                                "xhat_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (int j = 0; j < m; ++j) {
    std::vector<std::pair<int, R>> row;
    for (int i = 0; i < n; ++i) {
      row.emplace_back(map.bar[i][j], R(1));
      row.emplace_back(map.hat[i][j], R(1));
    }
    lp.addRow(std::move(row), Sense::LE, R(1));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, R>> row;
    for (int j = 0; j < m; ++j)
      if (!(inst.values[i][j] == R{})) row.emplace_back(map.bar[i][j], inst.values[i][j]);
    lp.addRow(std::move(row), Sense::LE, inst.budgets[i]);
  }
  return {std::move(lp), std::move(map)};
}

namespace detail {

template <class R>
SplitAllocation roundToSplitImpl(const BavwmInstance<R>& inst, const LpSolution<R>& frac,
                                 const RelaxationVarMap& map) {
  const int n = inst.agents, m = inst.items;
  auto [gap, roles] = buildGapFromBavwm(inst);
  FractionalAssignment<R> fa;
  fa.x.assign(gap.machines(), std::vector<R>(m, R{}));
  for (int j = 0; j < m; ++j) {
    R assigned{};
    for (int i = 0; i < n; ++i) {
      const R& xb = frac.values[map.bar[i][j]];
      const R& xh = frac.values[map.hat[i][j]];
      fa.x[roles.barMachine[i]][j] = xb < R{} ? R{} : xb;
      fa.x[roles.hatMachine[i]][j] = xh < R{} ? R{} : xh;
      assigned += fa.x[roles.barMachine[i]][j] + fa.x[roles.hatMachine[i]][j];
    }
    fa.x[roles.dummy][j] = assigned < R(1) ? R(1) - assigned : R{};
  }
  const IntegralAssignment rounded = stRound(gap, fa);
  SplitAllocation split;
  split.bar.assign(m, kUnassigned);
  split.hat.assign(m, kUnassigned);
  for (int j = 0; j < m; ++j) {
    const auto role = roles.roleOf[rounded.machineOf[j]];
    if (role.kind == GapBavwmMap::Role::Bar) split.bar[j] = role.agent;
    if (role.kind == GapBavwmMap::Role::Hat) split.hat[j] = role.agent;
  }
  return split;
}

}  // namespace detail

/// Rounds an optimal relaxation solution to an integral split with bar loads
/// at most 2b_i and split objective at least the LP optimum.
template <class R>
SplitAllocation roundToSplit(const BavwmInstance<R>& inst, const LpSolution<R>& frac) {
  if (frac.status != LpStatus::Optimal)
    throw std::invalid_argument("roundToSplit: LP solution is not optimal");
  auto [lp, map] = buildRelaxation(inst);
  if (static_cast<int>(frac.values.size()) != lp.numVars)
    throw std::invalid_argument("roundToSplit: solution size does not match relaxation");
  return detail::roundToSplitImpl(inst, frac, map);
}

/// Diagnostics of one tripartition run, for verification suites.
template <class R>
struct TripartitionInfo {
  std::vector<std::array<R, 3>> binLoads;   // per agent
  std::vector<std::array<R, 3>> binValues;  // per agent, sum of m_i*v_ij + w_ij
  std::vector<int> chosenBin;               // per agent; -1 no bar items, 3 whole set kept
  R inputObjective{};
  R outputObjective{};
};

/// Greedy tripartition repair: per agent, bar items are split into three bins
/// (descending v_ij, min-weight bin first), every bin provably fits in b_i,
/// and the most valuable bin is kept. An agent whose bar load already fits
/// the budget may keep the whole set instead when that is strictly better;
/// the /3 bound is unaffected. Hat items pass through.
template <class R>
SplitAllocation tripartitionSelect(const BavwmInstance<R>& inst, const SplitAllocation& split,
                                   TripartitionInfo<R>* info = nullptr) {
  detail::requireNormalized(inst, "tripartitionSelect");
  detail::requireAllocShape(inst, split.bar, "tripartitionSelect");
  detail::requireAllocShape(inst, split.hat, "tripartitionSelect");
  const int n = inst.agents, m = inst.items;
  const auto loads = barLoads(inst, split);
  for (int i = 0; i < n; ++i)
    if (!Num<R>::leq(loads[i], R(2) * inst.budgets[i]))
      throw std::invalid_argument("tripartitionSelect: agent " + std::to_string(i + 1) +
                                  " bar load exceeds twice the budget");

  SplitAllocation out;
  out.bar.assign(m, kUnassigned);
  out.hat = split.hat;
  if (info) {
    info->binLoads.assign(n, {R{}, R{}, R{}});
    info->binValues.assign(n, {R{}, R{}, R{}});
    info->chosenBin.assign(n, -1);
    info->inputObjective = splitObjective(inst, split);
  }

  std::vector<std::vector<int>> barItems(n);
  for (int j = 0; j < m; ++j)
    if (split.bar[j] != kUnassigned) barItems[split.bar[j]].push_back(j);

  for (int i = 0; i < n; ++i) {
    if (barItems[i].empty()) continue;
    auto& items = barItems[i];
    std::stable_sort(items.begin(), items.end(),
                     [&](int a, int b) { return inst.values[i][a] > inst.values[i][b]; });
    std::array<R, 3> load{R{}, R{}, R{}};
    std::array<R, 3> value{R{}, R{}, R{}};
    std::array<std::vector<int>, 3> bins;
    for (int j : items) {
      int k = 0;
      for (int t = 1; t < 3; ++t)
        if (load[t] < load[k]) k = t;
      load[k] += inst.values[i][j];
      value[k] += inst.multipliers[i] * inst.values[i][j] + inst.virtualValues[i][j];
      bins[k].push_back(j);
    }
    for (int k = 0; k < 3; ++k)
      if (!Num<R>::leq(load[k], inst.budgets[i]))
        throw std::logic_error("tripartitionSelect: bin exceeds budget (internal error)");
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (value[k] > value[best]) best = k;
    for (int j : bins[best]) out.bar[j] = i;
    if (info) {
      info->binLoads[i] = load;
      info->binValues[i] = value;
      info->chosenBin[i] = best;
    }
  }
  if (info) info->outputObjective = splitObjective(inst, out);
  return out;
}

/// Pipeline internals of one approximate solve, for tests and reports.
template <class R>
struct ApproxTrace {
  R lpValue{};
  SplitAllocation rounded;
  R roundedObjective{};
  SplitAllocation selected;
  R selectedObjective{};
  TripartitionInfo<R> tripartition;
  Allocation merged;
};

/// Options for the exhaustive solver.
struct ExactOptions {
  std::uint64_t sizeLimit = 10'000'000;
  bool parallel = true;
};

namespace detail {

inline std::uint64_t allocationCount(int agents, int items, std::uint64_t limit) {
  const std::uint64_t base = static_cast<std::uint64_t>(agents) + 1;
  std::uint64_t count = 1;
  for (int j = 0; j < items; ++j) {
    if (count > limit / base + 1) count = limit + 1;
    else count *= base;
    if (count > limit)
      throw SizeLimitError("solveExact: (n+1)^m exceeds the size limit of " +
                           std::to_string(limit));
  }
  return count;
}

/// Decodes allocation index (item 0 is the most significant digit; digit 0 is
/// unassigned, digit k is agent k-1) so that ascending index is lexicographic.
inline void decodeAllocation(std::uint64_t index, int agents, int items, std::vector<int>& out) {
  const std::uint64_t base = static_cast<std::uint64_t>(agents) + 1;
  out.resize(items);
  for (int j = items - 1; j >= 0; --j) {
    out[j] = static_cast<int>(index % base) - 1;
    index /= base;
  }
}

template <class R>
struct BestAllocation {
  R value{};
  std::uint64_t index = 0;
  bool found = false;
};

// serial scan of [begin, end); keeps the lexicographically first maximizer
template <class R>
BestAllocation<R> scanAllocations(const BavwmInstance<R>& inst, std::uint64_t begin,
                                  std::uint64_t end) {
  BestAllocation<R> best;
  std::vector<int> digits(inst.items);
  std::vector<R> load(inst.agents);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    decodeAllocation(idx, inst.agents, inst.items, digits);
    std::fill(load.begin(), load.end(), R{});
    R value{};
    for (int j = 0; j < inst.items; ++j) {
      const int a = digits[j];
      if (a == kUnassigned) continue;
      load[a] += inst.values[a][j];
      value += inst.virtualValues[a][j];
    }
    for (int i = 0; i < inst.agents; ++i)
      value += inst.multipliers[i] * (load[i] < inst.budgets[i] ? load[i] : inst.budgets[i]);
    if (!best.found || value > best.value) {
      best.value = value;
      best.index = idx;
      best.found = true;
    }
  }
  return best;
}

}  // namespace detail

/// Exhaustive (n+1)^m search, serial reference kernel.
template <class R>
BavwmResult<R> solveExactSerial(const BavwmInstance<R>& raw, const ExactOptions& opt = {}) {
  const auto bad = validate(raw);
  if (!bad.empty()) throw std::invalid_argument("solveExact: " + bad.front());
  const BavwmInstance<R> inst = normalize(raw);
  const std::uint64_t count = detail::allocationCount(inst.agents, inst.items, opt.sizeLimit);
  const auto best = detail::scanAllocations(inst, 0, count);
  BavwmResult<R> result;
  result.method = Method::Exact;
  detail::decodeAllocation(best.index, inst.agents, inst.items, result.allocation.assignment);
  result.objectiveValue = objective(inst, result.allocation);
  result.prices = pricesFromAllocation(inst, result.allocation);
  return result;
}

/// Exhaustive (n+1)^m search; OpenMP-parallel over index chunks. The merge
/// prefers strictly larger value, then smaller index, so the result matches
/// solveExactSerial for any thread count.
template <class R>
BavwmResult<R> solveExact(const BavwmInstance<R>& raw, const ExactOptions& opt = {});

/// One end-to-end 3-approximation: relaxation LP, GAP rounding, tripartition
/// repair, merge. The certificate is the LP optimum.
template <class R>
BavwmResult<R> solveApprox(const BavwmInstance<R>& raw, ApproxTrace<R>* trace = nullptr,
                           const SimplexOptions& lpOpt = {}) {
  const auto bad = validate(raw);
  if (!bad.empty()) throw std::invalid_argument("solveApprox: " + bad.front());
  const BavwmInstance<R> inst = normalize(raw);
  auto [lp, map] = buildRelaxation(inst);
  const auto sol = solveLp(lp, lpOpt);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("solveApprox: relaxation should always be optimal");

  const SplitAllocation rounded = detail::roundToSplitImpl(inst, sol, map);
  TripartitionInfo<R> tri;
  SplitAllocation selected = tripartitionSelect(inst, rounded, &tri);

  // hat items with negative virtual value only hurt the merged objective
  SplitAllocation cleaned = selected;
  for (int j = 0; j < inst.items; ++j)
    if (cleaned.hat[j] != kUnassigned && inst.virtualValues[cleaned.hat[j]][j] < R{})
      cleaned.hat[j] = kUnassigned;

  BavwmResult<R> result;
  result.method = Method::Approx;
  result.certificate = sol.objectiveValue;
  result.allocation = mergeSplit(cleaned);
  result.objectiveValue = objective(inst, result.allocation);
  result.prices = pricesFromAllocation(inst, result.allocation);
  if (trace) {
    trace->lpValue = sol.objectiveValue;
    trace->rounded = rounded;
    trace->roundedObjective = splitObjective(inst, rounded);
    trace->selected = selected;
    trace->selectedObjective = splitObjective(inst, selected);
    trace->tripartition = std::move(tri);
    trace->merged = result.allocation;
  }
  return result;
}

}  // namespace bauc

// OpenMP kernel lives apart so that the header stays usable without -fopenmp.
#if defined(_OPENMP)
#include <omp.h>
#endif

namespace bauc {

template <class R>
BavwmResult<R> solveExact(const BavwmInstance<R>& raw, const ExactOptions& opt) {
  const auto bad = validate(raw);
  if (!bad.empty()) throw std::invalid_argument("solveExact: " + bad.front());
  const BavwmInstance<R> inst = normalize(raw);
  const std::uint64_t count = detail::allocationCount(inst.agents, inst.items, opt.sizeLimit);

  detail::BestAllocation<R> best;
#if defined(_OPENMP)
  if (opt.parallel && count >= 2048) {
    const int chunks = static_cast<int>(std::min<std::uint64_t>(64, count / 512));
    std::vector<detail::BestAllocation<R>> partial(chunks);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
      const std::uint64_t lo = count * static_cast<std::uint64_t>(c) / chunks;
      const std::uint64_t hi = count * (static_cast<std::uint64_t>(c) + 1) / chunks;
      partial[c] = detail::scanAllocations(inst, lo, hi);
    }
    for (const auto& p : partial) {
      if (!p.found) continue;
      if (!best.found || p.value > best.value ||
          (p.value == best.value && p.index < best.index))
        best = p;
    }
  } else
#endif
  {
    best = detail::scanAllocations(inst, 0, count);
  }

  BavwmResult<R> result;
  result.method = Method::Exact;
  detail::decodeAllocation(best.index, inst.agents, inst.items, result.allocation.assignment);
  result.objectiveValue = objective(inst, result.allocation);
  result.prices = pricesFromAllocation(inst, result.allocation);
  return result;
}

}  // namespace bauc
