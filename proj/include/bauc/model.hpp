#pragma once

#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bauc/numeric.hpp"

namespace bauc {

/// Sentinel for "item not assigned to any agent".
inline constexpr int kUnassigned = -1;

/// Input block of Budgeted-Additive Virtual Welfare Maximization: n agents,
/// m items, values v[i][j] >= 0, budgets b[i] >= 0, price multipliers mult[i]
/// and virtual values w[i][j] (both sign-unrestricted until normalization).
template <class R>
struct BavwmInstance {
  int agents = 0;
  int items = 0;
  std::vector<std::vector<R>> values;
  std::vector<R> budgets;
  std::vector<R> multipliers;
  std::vector<std::vector<R>> virtualValues;
  bool normalized = false;
};

/// Integral allocation: per item the receiving agent or kUnassigned.
struct Allocation {
  std::vector<int> assignment;
};

/// Integral allocation split into budget-counted (bar) and additive-only
/// (hat) parts; per item at most one of the two holds an agent.
struct SplitAllocation {
  std::vector<int> bar;
  std::vector<int> hat;
};

template <class R>
struct PriceVector {
  std::vector<R> prices;
};

template <class R>
std::vector<std::string> validate(const BavwmInstance<R>& inst) {
  std::vector<std::string> out;
  const int n = inst.agents, m = inst.items;
  auto idx = [](int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
  };
  if (n < 0 || m < 0) {
    out.push_back("agent/item counts must be nonnegative");
    return out;
  }
  if (static_cast<int>(inst.values.size()) != n) out.push_back("values: row count != n");
  if (static_cast<int>(inst.virtualValues.size()) != n)
    out.push_back("virtual_values: row count != n");
  if (static_cast<int>(inst.budgets.size()) != n) out.push_back("budgets: length != n");
  if (static_cast<int>(inst.multipliers.size()) != n) out.push_back("multipliers: length != n");
  if (!out.empty()) return out;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(inst.values[i].size()) != m)
      out.push_back("values row " + std::to_string(i + 1) + ": length != m");
    if (static_cast<int>(inst.virtualValues[i].size()) != m)
      out.push_back("virtual_values row " + std::to_string(i + 1) + ": length != m");
  }
  if (!out.empty()) return out;
  for (int i = 0; i < n; ++i) {
    if (inst.budgets[i] < R{}) out.push_back("budgets(" + std::to_string(i + 1) + "): negative");
    for (int j = 0; j < m; ++j) {
      if (inst.values[i][j] < R{}) out.push_back("values" + idx(i, j) + ": negative");
      if (inst.normalized && inst.values[i][j] > inst.budgets[i])
        out.push_back("values" + idx(i, j) + ": exceeds budget in normalized instance");
    }
    if (inst.normalized && inst.multipliers[i] < R{})
      out.push_back("multipliers(" + std::to_string(i + 1) + "): negative in normalized instance");
  }
  return out;
}

/// Clamps negative multipliers to 0 and values to min{v_ij, b_i}; both leave
/// every allocation's objective unchanged.
template <class R>
BavwmInstance<R> normalize(BavwmInstance<R> inst) {
  for (int i = 0; i < inst.agents; ++i) {
    if (inst.multipliers[i] < R{}) inst.multipliers[i] = R{};
    for (int j = 0; j < inst.items; ++j)
      if (inst.values[i][j] > inst.budgets[i]) inst.values[i][j] = inst.budgets[i];
  }
  inst.normalized = true;
  return inst;
}

namespace detail {

template <class R>
void requireNormalized(const BavwmInstance<R>& inst, const char* op) {
  if (!inst.normalized)
    throw std::invalid_argument(std::string(op) + ": instance must be normalized");
}

template <class R>
void requireAllocShape(const BavwmInstance<R>& inst, const std::vector<int>& assignment,
                       const char* op) {
  if (static_cast<int>(assignment.size()) != inst.items)
    throw std::invalid_argument(std::string(op) + ": assignment length != m");
  for (int a : assignment)
    if (a != kUnassigned && (a < 0 || a >= inst.agents))
      throw std::invalid_argument(std::string(op) + ": agent index out of range");
}

}  // namespace detail

/// Per-agent bundle values sum(v_ij) over the agent's assigned items.
template <class R>
std::vector<R> bundleValues(const BavwmInstance<R>& inst, const Allocation& alloc) {
  std::vector<R> load(inst.agents, R{});
  for (int j = 0; j < inst.items; ++j) {
    const int a = alloc.assignment[j];
    if (a != kUnassigned) load[a] += inst.values[a][j];
  }
  return load;
}

/// Sum_i m_i * min{b_i, bundle_i} + sum of w_ij over assigned pairs.
template <class R>
R objective(const BavwmInstance<R>& inst, const Allocation& alloc) {
  detail::requireNormalized(inst, "objective");
  detail::requireAllocShape(inst, alloc.assignment, "objective");
  const auto load = bundleValues(inst, alloc);
  R total{};
  for (int i = 0; i < inst.agents; ++i)
    total += inst.multipliers[i] * (load[i] < inst.budgets[i] ? load[i] : inst.budgets[i]);
  for (int j = 0; j < inst.items; ++j) {
    const int a = alloc.assignment[j];
    if (a != kUnassigned) total += inst.virtualValues[a][j];
  }
  return total;
}

/// Split objective; bar items are credited at face value with no
/// min-truncation, which is what the rounding theorem reasons about.
template <class R>
R splitObjective(const BavwmInstance<R>& inst, const SplitAllocation& split) {
  detail::requireNormalized(inst, "splitObjective");
  detail::requireAllocShape(inst, split.bar, "splitObjective");
  detail::requireAllocShape(inst, split.hat, "splitObjective");
  R total{};
  for (int j = 0; j < inst.items; ++j) {
    const int ab = split.bar[j], ah = split.hat[j];
    if (ab != kUnassigned && ah != kUnassigned)
      throw std::invalid_argument("splitObjective: item " + std::to_string(j + 1) +
                                  " assigned in both bar and hat parts");
    if (ab != kUnassigned)
      total += inst.multipliers[ab] * inst.values[ab][j] + inst.virtualValues[ab][j];
    if (ah != kUnassigned) total += inst.virtualValues[ah][j];
  }
  return total;
}

/// Optimal prices for a fixed allocation: min{b_i, bundle_i} when the
/// multiplier is positive, else 0.
template <class R>
PriceVector<R> pricesFromAllocation(const BavwmInstance<R>& inst, const Allocation& alloc) {
  detail::requireNormalized(inst, "pricesFromAllocation");
  detail::requireAllocShape(inst, alloc.assignment, "pricesFromAllocation");
  const auto load = bundleValues(inst, alloc);
  PriceVector<R> pv;
  pv.prices.assign(inst.agents, R{});
  for (int i = 0; i < inst.agents; ++i)
    if (inst.multipliers[i] > R{})
      pv.prices[i] = load[i] < inst.budgets[i] ? load[i] : inst.budgets[i];
  return pv;
}

/// Collapses a split into a plain allocation.
inline Allocation mergeSplit(const SplitAllocation& split) {
  Allocation out;
  out.assignment.resize(split.bar.size(), kUnassigned);
  for (std::size_t j = 0; j < split.bar.size(); ++j) {
    if (split.bar[j] != kUnassigned && split.hat[j] != kUnassigned)
      throw std::invalid_argument("mergeSplit: item assigned in both parts");
    out.assignment[j] = split.bar[j] != kUnassigned ? split.bar[j] : split.hat[j];
  }
  return out;
}

/// Per-agent bar load sum(v_ij) of a split's budget-counted part.
template <class R>
std::vector<R> barLoads(const BavwmInstance<R>& inst, const SplitAllocation& split) {
  std::vector<R> load(inst.agents, R{});
  for (int j = 0; j < inst.items; ++j)
    if (split.bar[j] != kUnassigned) load[split.bar[j]] += inst.values[split.bar[j]][j];
  return load;
}

/// Scalar conversions: double -> Rational is exact; Rational -> double rounds.
template <class To, class From>
To convertScalar(const From& x) {
  if constexpr (std::is_same_v<To, From>)
    return x;
  else
    return Num<To>::fromDouble(Num<From>::toDouble(x));
}

/// Instance copy in another scalar type.
template <class To, class From>
BavwmInstance<To> convertInstance(const BavwmInstance<From>& in) {
  BavwmInstance<To> out;
  out.agents = in.agents;
  out.items = in.items;
  out.normalized = in.normalized;
  out.budgets.reserve(in.agents);
  out.multipliers.reserve(in.agents);
  for (int i = 0; i < in.agents; ++i) {
    out.budgets.push_back(convertScalar<To>(in.budgets[i]));
    out.multipliers.push_back(convertScalar<To>(in.multipliers[i]));
    std::vector<To> vrow, wrow;
    for (int j = 0; j < in.items; ++j) {
      vrow.push_back(convertScalar<To>(in.values[i][j]));
      wrow.push_back(convertScalar<To>(in.virtualValues[i][j]));
    }
    out.values.push_back(std::move(vrow));
    out.virtualValues.push_back(std::move(wrow));
  }
  return out;
}

}  // namespace bauc
