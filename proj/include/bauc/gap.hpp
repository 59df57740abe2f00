#pragma once

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bauc/lp.hpp"
#include "bauc/model.hpp"
#include "bauc/numeric.hpp"

namespace bauc {

/// Generalized Assignment Problem: machines with capacities T_i, jobs with
/// per-machine processing times p_ij and (sign-unrestricted) costs c_ij.
/// Objective is maximization of total cost.
template <class R>
struct GapInstance {
  std::vector<R> capacities;
  int jobs = 0;
  std::vector<std::vector<R>> processing;  // machines x jobs
  std::vector<std::vector<R>> cost;        // machines x jobs
  int machines() const { return static_cast<int>(capacities.size()); }
};

template <class R>
struct FractionalAssignment {
  std::vector<std::vector<R>> x;  // machines x jobs, in [0,1]
};

struct IntegralAssignment {
  std::vector<int> machineOf;  // per job
};

/// Machine-role bookkeeping for the BAVWM embedding: machine 0 is the dummy
/// collecting unallocated items, then one hat and one bar machine per agent.
struct GapBavwmMap {
  struct Role {
    enum Kind { Dummy, Hat, Bar };
    Kind kind = Dummy;
    int agent = -1;
  };
  int dummy = 0;
  std::vector<int> hatMachine;  // per agent
  std::vector<int> barMachine;  // per agent
  std::vector<Role> roleOf;     // per machine
};

template <class R>
std::vector<std::string> validateGap(const GapInstance<R>& gap) {
  std::vector<std::string> out;
  const int k = gap.machines();
  if (gap.jobs < 0) out.push_back("jobs: negative");
  if (static_cast<int>(gap.processing.size()) != k) out.push_back("processing: row count != machines");
  if (static_cast<int>(gap.cost.size()) != k) out.push_back("cost: row count != machines");
  if (!out.empty()) return out;
  for (int i = 0; i < k; ++i) {
    if (gap.capacities[i] < R{}) out.push_back("capacity(" + std::to_string(i + 1) + "): negative");
    if (static_cast<int>(gap.processing[i].size()) != gap.jobs)
      out.push_back("processing row " + std::to_string(i + 1) + ": length != jobs");
    if (static_cast<int>(gap.cost[i].size()) != gap.jobs)
      out.push_back("cost row " + std::to_string(i + 1) + ": length != jobs");
  }
  if (!out.empty()) return out;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < gap.jobs; ++j)
      if (gap.processing[i][j] < R{})
        out.push_back("processing(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      "): negative");
  return out;
}

/// GAP instance of the rounding theorem's proof: a dummy machine absorbing
/// unallocated items, hat machines (p=0, c=w_ij, T=0) and bar machines
/// (p=v_ij, c=m_i*v_ij+w_ij, T=b_i).
template <class R>
std::pair<GapInstance<R>, GapBavwmMap> buildGapFromBavwm(const BavwmInstance<R>& inst) {
  detail::requireNormalized(inst, "buildGapFromBavwm");
  const int n = inst.agents, m = inst.items;
  GapInstance<R> gap;
  GapBavwmMap map;
  const int machines = 2 * n + 1;
  gap.jobs = m;
  gap.capacities.assign(machines, R{});
  gap.processing.assign(machines, std::vector<R>(m, R{}));
  gap.cost.assign(machines, std::vector<R>(m, R{}));
  map.roleOf.assign(machines, {});
  map.dummy = 0;
  map.roleOf[0] = {GapBavwmMap::Role::Dummy, -1};
  map.hatMachine.resize(n);
  map.barMachine.resize(n);
  for (int i = 0; i < n; ++i) {
    const int hat = 1 + i;
    const int bar = 1 + n + i;
    map.hatMachine[i] = hat;
    map.barMachine[i] = bar;
    map.roleOf[hat] = {GapBavwmMap::Role::Hat, i};
    map.roleOf[bar] = {GapBavwmMap::Role::Bar, i};
    gap.capacities[bar] = inst.budgets[i];
    for (int j = 0; j < m; ++j) {
      gap.cost[hat][j] = inst.virtualValues[i][j];
      gap.processing[bar][j] = inst.values[i][j];
      gap.cost[bar][j] = inst.multipliers[i] * inst.values[i][j] + inst.virtualValues[i][j];
    }
  }
  return {std::move(gap), std::move(map)};
}

template <class R>
R fractionalCost(const GapInstance<R>& gap, const FractionalAssignment<R>& frac) {
  R total{};
  for (int i = 0; i < gap.machines(); ++i)
    for (int j = 0; j < gap.jobs; ++j)
      if (!(frac.x[i][j] == R{})) total += frac.x[i][j] * gap.cost[i][j];
  return total;
}

template <class R>
R assignmentCost(const GapInstance<R>& gap, const IntegralAssignment& assign) {
  R total{};
  for (int j = 0; j < gap.jobs; ++j) total += gap.cost[assign.machineOf[j]][j];
  return total;
}

template <class R>
std::vector<R> machineLoads(const GapInstance<R>& gap, const IntegralAssignment& assign) {
  std::vector<R> load(gap.machines(), R{});
  for (int j = 0; j < gap.jobs; ++j) load[assign.machineOf[j]] += gap.processing[assign.machineOf[j]][j];
  return load;
}

/// Optimal fractional solution of the assignment LP: every job fully
/// assigned, machine loads within capacity, x_ij = 0 where p_ij > T_i.
template <class R>
FractionalAssignment<R> solveGapLp(const GapInstance<R>& gap, const SimplexOptions& opt = {}) {
  const auto bad = validateGap(gap);
  if (!bad.empty()) throw std::invalid_argument("solveGapLp: " + bad.front());
  const int k = gap.machines();
  for (int j = 0; j < gap.jobs; ++j) {
    bool eligible = false;
    for (int i = 0; i < k && !eligible; ++i)
      if (!(gap.processing[i][j] > gap.capacities[i])) eligible = true;
    if (!eligible)
      throw InfeasibleError("solveGapLp: job " + std::to_string(j + 1) + " has no eligible machine");
  }

  LinearProgram<R> lp;
  std::vector<std::vector<int>> var(k, std::vector<int>(gap.jobs, -1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < gap.jobs; ++j)
      if (!(gap.processing[i][j] > gap.capacities[i]))
        var[i][j] = lp.addVar(R{}, std::nullopt, gap.cost[i][j],
                              "x_" + std::to_string(i) + "_" + std::to_string(j));
  for (int j = 0; j < gap.jobs; ++j) {
    std::vector<std::pair<int, R>> row;
    for (int i = 0; i < k; ++i)
      if (var[i][j] >= 0) row.emplace_back(var[i][j], R(1));
    lp.addRow(std::move(row), Sense::EQ, R(1));
  }
  for (int i = 0; i < k; ++i) {
    std::vector<std::pair<int, R>> row;
    for (int j = 0; j < gap.jobs; ++j)
      if (var[i][j] >= 0 && !(gap.processing[i][j] == R{}))
        row.emplace_back(var[i][j], gap.processing[i][j]);
    if (!row.empty()) lp.addRow(std::move(row), Sense::LE, gap.capacities[i]);
  }

  const auto sol = solveLp(lp, opt);
  if (sol.status == LpStatus::Infeasible)
    throw InfeasibleError("solveGapLp: assignment LP infeasible (capacities too tight)");
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("solveGapLp: unexpected LP status");

  FractionalAssignment<R> frac;
  frac.x.assign(k, std::vector<R>(gap.jobs, R{}));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < gap.jobs; ++j)
      if (var[i][j] >= 0) {
        R v = sol.values[var[i][j]];
        if (v < R{}) v = R{};  // float hygiene on basic variables
        frac.x[i][j] = v;
      }
  return frac;
}

template <class R>
std::vector<std::string> validateFractional(const GapInstance<R>& gap,
                                            const FractionalAssignment<R>& frac) {
  std::vector<std::string> out;
  const int k = gap.machines();
  if (static_cast<int>(frac.x.size()) != k) {
    out.push_back("fractional assignment: row count != machines");
    return out;
  }
  for (int i = 0; i < k; ++i)
    if (static_cast<int>(frac.x[i].size()) != gap.jobs) {
      out.push_back("fractional assignment: row length != jobs");
      return out;
    }
  for (int j = 0; j < gap.jobs; ++j) {
    R sum{};
    for (int i = 0; i < k; ++i) {
      const R& v = frac.x[i][j];
      if (v < -Num<R>::tol() || v > R(1) + Num<R>::tol())
        out.push_back("x(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      "): outside [0,1]");
      if (gap.processing[i][j] > gap.capacities[i] && !Num<R>::isZero(v))
        out.push_back("x(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      "): positive on ineligible machine");
      sum += v;
    }
    if (!Num<R>::eq(sum, R(1)))
      out.push_back("job " + std::to_string(j + 1) + ": fractions do not sum to 1");
  }
  for (int i = 0; i < k; ++i) {
    R load{};
    for (int j = 0; j < gap.jobs; ++j) load += frac.x[i][j] * gap.processing[i][j];
    if (!Num<R>::leq(load, gap.capacities[i]))
      out.push_back("machine " + std::to_string(i + 1) + ": fractional load exceeds capacity");
  }
  return out;
}

namespace detail {

inline long ceilToLong(const Rational& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return c.get_si();
}

// Slot construction of the rounding theorem, in exact arithmetic: ceil(sum)
// unit-capacity slots per machine, jobs packed by nonincreasing processing
// time, then a max-cost perfect matching of jobs to slots along positive
// packed fractions. The matching polytope is integral, so the exact-mode LP
// vertex is 0/1.
inline IntegralAssignment stRoundCore(const GapInstance<Rational>& gap,
                                      std::vector<std::vector<Rational>> x) {
  const int k = gap.machines();
  const int jobs = gap.jobs;

  // renormalize job columns to sum exactly 1
  for (int j = 0; j < jobs; ++j) {
    Rational sum{};
    for (int i = 0; i < k; ++i) sum += x[i][j];
    if (sum == 0)
      throw std::invalid_argument("stRound: job " + std::to_string(j + 1) +
                                  " has no positive fraction");
    if (sum != 1)
      for (int i = 0; i < k; ++i) x[i][j] /= sum;
  }

  struct Edge {
    int job;
    int slot;
    int machine;
  };
  std::vector<Edge> edges;
  int slotCount = 0;

  for (int i = 0; i < k; ++i) {
    std::vector<int> order;
    Rational sum{};
    for (int j = 0; j < jobs; ++j)
      if (x[i][j] > 0) {
        order.push_back(j);
        sum += x[i][j];
      }
    if (order.empty()) continue;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return gap.processing[i][a] > gap.processing[i][b];  // ties keep job order
    });
    const long numSlots = ceilToLong(sum);
    const int firstSlot = slotCount;
    slotCount += static_cast<int>(numSlots);
    int cur = firstSlot;
    Rational room(1);
    for (int j : order) {
      Rational f = x[i][j];
      while (f > 0) {
        assert(cur < slotCount);
        const Rational take = f < room ? f : room;
        edges.push_back({j, cur, i});
        f -= take;
        room -= take;
        if (room == 0) {
          ++cur;
          room = 1;
        }
      }
    }
  }

  // max-cost matching along the packed edges; exact LP keeps it integral
  LinearProgram<Rational> lp;
  for (const Edge& e : edges)
    lp.addVar(Rational(0), std::nullopt, gap.cost[e.machine][e.job]);
  std::vector<std::vector<int>> byJob(jobs), bySlot(slotCount);
  for (std::size_t t = 0; t < edges.size(); ++t) {
    byJob[edges[t].job].push_back(static_cast<int>(t));
    bySlot[edges[t].slot].push_back(static_cast<int>(t));
  }
  for (int j = 0; j < jobs; ++j) {
    std::vector<std::pair<int, Rational>> row;
    for (int t : byJob[j]) row.emplace_back(t, Rational(1));
    lp.addRow(std::move(row), Sense::EQ, Rational(1));
  }
  for (int s = 0; s < slotCount; ++s) {
    std::vector<std::pair<int, Rational>> row;
    for (int t : bySlot[s]) row.emplace_back(t, Rational(1));
    lp.addRow(std::move(row), Sense::LE, Rational(1));
  }

  SimplexOptions opt;
  const auto sol = solveLp(lp, opt);
  if (sol.status != LpStatus::Optimal)
    throw std::logic_error("stRound: matching LP not optimal (internal error)");

  IntegralAssignment out;
  out.machineOf.assign(jobs, -1);
  for (std::size_t t = 0; t < edges.size(); ++t) {
    const Rational& y = sol.values[t];
    if (y == 0) continue;
    if (y != 1) throw std::logic_error("stRound: fractional matching vertex (internal error)");
    if (out.machineOf[edges[t].job] != -1)
      throw std::logic_error("stRound: job matched twice (internal error)");
    out.machineOf[edges[t].job] = edges[t].machine;
  }
  for (int j = 0; j < jobs; ++j)
    if (out.machineOf[j] < 0) throw std::logic_error("stRound: job unmatched (internal error)");
  return out;
}

template <class R>
GapInstance<Rational> rationalizeGap(const GapInstance<R>& gap) {
  GapInstance<Rational> out;
  out.jobs = gap.jobs;
  const int k = gap.machines();
  out.capacities.reserve(k);
  for (int i = 0; i < k; ++i) out.capacities.push_back(convertScalar<Rational>(gap.capacities[i]));
  out.processing.assign(k, {});
  out.cost.assign(k, {});
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < gap.jobs; ++j) {
      out.processing[i].push_back(convertScalar<Rational>(gap.processing[i][j]));
      out.cost[i].push_back(convertScalar<Rational>(gap.cost[i][j]));
    }
  return out;
}

}  // namespace detail

/// Rounds a fractional assignment to an integral one with cost at least the
/// fractional cost and per-machine load at most twice the capacity.
template <class R>
IntegralAssignment stRound(const GapInstance<R>& gap, const FractionalAssignment<R>& frac) {
  auto bad = validateGap(gap);
  if (bad.empty()) {
    auto fb = validateFractional(gap, frac);
    bad.insert(bad.end(), fb.begin(), fb.end());
  }
  if (!bad.empty()) throw std::invalid_argument("stRound: " + bad.front());

  if constexpr (Num<R>::exact) {
    return detail::stRoundCore(gap, frac.x);
  } else {
    std::vector<std::vector<Rational>> x(gap.machines(),
                                         std::vector<Rational>(gap.jobs, Rational(0)));
    for (int i = 0; i < gap.machines(); ++i)
      for (int j = 0; j < gap.jobs; ++j) {
        const double v = frac.x[i][j];
        if (v >= Num<double>::dropTol()) x[i][j] = Rational(v);
      }
    return detail::stRoundCore(detail::rationalizeGap(gap), std::move(x));
  }
}

}  // namespace bauc
