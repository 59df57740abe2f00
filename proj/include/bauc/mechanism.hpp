#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bauc/bavwm.hpp"
#include "bauc/lp.hpp"
#include "bauc/model.hpp"
#include "bauc/numeric.hpp"

namespace bauc {

/// One type of a bidder: item values, a hard budget, and its prior mass.
template <class R>
struct BidderType {
  std::vector<R> values;
  R budget{};
  R probability{};
};

/// Finite product prior over bidder types.
template <class R>
struct Prior {
  int items = 0;
  std::vector<std::vector<BidderType<R>>> bidders;
  int bidderCount() const { return static_cast<int>(bidders.size()); }
};

/// Per-bidder, per-type virtual transformation: a nonnegative price
/// multiplier and a vector of (sign-unrestricted) virtual item values.
template <class R>
struct VirtualMapping {
  std::vector<std::vector<R>> multipliers;                 // [bidder][type]
  std::vector<std::vector<std::vector<R>>> virtualValues;  // [bidder][type][item]
};

template <class R>
struct MappingDistribution {
  struct Entry {
    R weight{};
    VirtualMapping<R> mapping;
  };
  std::vector<Entry> entries;
};

enum class BicMode { Full, BudgetDownward };

/// Ex-post description of a mechanism at desk scale: per profile a lottery
/// over deterministic allocations with payment masses z_i(t,a) =
/// lambda(t,a) * p_i(t,a), plus the derived interim forms.
template <class R>
struct MechanismSolution {
  int items = 0;
  std::vector<int> typeCounts;
  std::vector<std::vector<int>> profiles;     // [profile][bidder] -> type index
  std::vector<R> profileProb;                 // product of type probabilities
  std::vector<std::vector<int>> allocations;  // [alloc][item] -> agent or kUnassigned
  std::vector<std::vector<R>> lambda;         // [profile][alloc]
  std::vector<std::vector<std::vector<R>>> paymentMass;   // [profile][alloc][bidder]
  std::vector<std::vector<std::vector<R>>> interimAlloc;  // [bidder][type][item]
  std::vector<std::vector<R>> interimPay;                 // [bidder][type]
  R revenue{};
};

struct MechanismOptions {
  std::uint64_t sizeLimit = 1'000'000;  // cap on profiles x allocations
  SimplexOptions lp;
};

template <class R>
std::vector<std::string> validatePrior(const Prior<R>& prior) {
  std::vector<std::string> out;
  if (prior.items < 0) out.push_back("items: negative");
  const R probTol = Num<R>::exact ? R{} : Num<R>::fromDouble(1e-12);
  for (int i = 0; i < prior.bidderCount(); ++i) {
    const auto& types = prior.bidders[i];
    if (types.empty()) {
      out.push_back("bidder " + std::to_string(i + 1) + ": no types");
      continue;
    }
    R sum{};
    for (std::size_t t = 0; t < types.size(); ++t) {
      const auto& ty = types[t];
      const std::string where =
          "bidder " + std::to_string(i + 1) + " type " + std::to_string(t + 1);
      if (static_cast<int>(ty.values.size()) != prior.items)
        out.push_back(where + ": values length != m");
      for (const R& v : ty.values)
        if (v < R{}) out.push_back(where + ": negative value");
      if (ty.budget < R{}) out.push_back(where + ": negative budget");
      if (!(ty.probability > R{}) || ty.probability > R(1))
        out.push_back(where + ": probability outside (0,1]");
      sum += ty.probability;
    }
    const R err = sum > R(1) ? sum - R(1) : R(1) - sum;
    if (err > probTol)
      out.push_back("bidder " + std::to_string(i + 1) + ": probabilities do not sum to 1");
  }
  return out;
}

template <class R>
std::vector<std::string> validateMapping(const Prior<R>& prior, const VirtualMapping<R>& map) {
  std::vector<std::string> out;
  const int n = prior.bidderCount();
  if (static_cast<int>(map.multipliers.size()) != n ||
      static_cast<int>(map.virtualValues.size()) != n) {
    out.push_back("mapping: bidder count mismatch");
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const std::size_t types = prior.bidders[i].size();
    if (map.multipliers[i].size() != types || map.virtualValues[i].size() != types) {
      out.push_back("mapping: type count mismatch for bidder " + std::to_string(i + 1));
      continue;
    }
    for (std::size_t t = 0; t < types; ++t) {
      if (map.multipliers[i][t] < R{})
        out.push_back("mapping: negative multiplier for bidder " + std::to_string(i + 1));
      if (static_cast<int>(map.virtualValues[i][t].size()) != prior.items)
        out.push_back("mapping: virtual values length != m for bidder " + std::to_string(i + 1));
    }
  }
  return out;
}

namespace detail {

template <class R>
std::vector<std::vector<int>> enumerateProfiles(const Prior<R>& prior) {
  const int n = prior.bidderCount();
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= prior.bidders[i].size();
  std::vector<std::vector<int>> out;
  out.reserve(total);
  for (std::uint64_t p = 0; p < total; ++p) {
    std::vector<int> types(n);
    std::uint64_t rest = p;
    for (int i = n - 1; i >= 0; --i) {
      const std::uint64_t k = prior.bidders[i].size();
      types[i] = static_cast<int>(rest % k);
      rest /= k;
    }
    out.push_back(std::move(types));
  }
  return out;
}

/// Bidder i's total value for her bundle under allocation a when her type is ty.
template <class R>
R bidderBundleValue(const BidderType<R>& ty, const std::vector<int>& alloc, int bidder) {
  R v{};
  for (std::size_t j = 0; j < alloc.size(); ++j)
    if (alloc[j] == bidder) v += ty.values[j];
  return v;
}

template <class R>
R paymentCap(const BidderType<R>& ty, const std::vector<int>& alloc, int bidder) {
  const R v = bidderBundleValue(ty, alloc, bidder);
  return v < ty.budget ? v : ty.budget;
}

}  // namespace detail

/// Fills profile probabilities, interim forms, and expected revenue from the
/// lottery and payment-mass tables.
template <class R>
void computeInterimForms(const Prior<R>& prior, MechanismSolution<R>& sol) {
  const int n = prior.bidderCount();
  const int m = prior.items;
  sol.profileProb.assign(sol.profiles.size(), R(1));
  for (std::size_t t = 0; t < sol.profiles.size(); ++t)
    for (int i = 0; i < n; ++i)
      sol.profileProb[t] *= prior.bidders[i][sol.profiles[t][i]].probability;

  sol.interimAlloc.assign(n, {});
  sol.interimPay.assign(n, {});
  for (int i = 0; i < n; ++i) {
    sol.interimAlloc[i].assign(prior.bidders[i].size(), std::vector<R>(m, R{}));
    sol.interimPay[i].assign(prior.bidders[i].size(), R{});
  }
  sol.revenue = R{};
  for (std::size_t t = 0; t < sol.profiles.size(); ++t) {
    for (int i = 0; i < n; ++i) {
      const int ti = sol.profiles[t][i];
      const R prOthers = sol.profileProb[t] / prior.bidders[i][ti].probability;
      for (std::size_t a = 0; a < sol.allocations.size(); ++a) {
        const R& w = sol.lambda[t][a];
        if (!(w == R{}))
          for (int j = 0; j < m; ++j)
            if (sol.allocations[a][j] == i) sol.interimAlloc[i][ti][j] += prOthers * w;
        const R& z = sol.paymentMass[t][a][i];
        if (!(z == R{})) {
          sol.interimPay[i][ti] += prOthers * z;
          sol.revenue += sol.profileProb[t] * z;
        }
      }
    }
  }
}

/// Revenue-optimal BIC, interim-IR, ex-post-IR, ex-post-budget-respecting,
/// no-positive-transfer mechanism over enumerated profiles and deterministic
/// allocations. BUDGET_DOWNWARD keeps only misreports with a weakly lower
/// budget, which can only enlarge the feasible set.
template <class R>
MechanismSolution<R> solveOptimalMechanism(const Prior<R>& prior,
                                           BicMode mode = BicMode::Full,
                                           const MechanismOptions& opt = {}) {
  const auto bad = validatePrior(prior);
  if (!bad.empty()) throw std::invalid_argument("solveOptimalMechanism: " + bad.front());
  const int n = prior.bidderCount();
  const int m = prior.items;

  MechanismSolution<R> sol;
  sol.items = m;
  sol.typeCounts.resize(n);
  for (int i = 0; i < n; ++i) sol.typeCounts[i] = static_cast<int>(prior.bidders[i].size());
  sol.profiles = detail::enumerateProfiles(prior);

  std::uint64_t allocCount = 0;
  try {
    allocCount = detail::allocationCount(n, m, opt.sizeLimit);
  } catch (const SizeLimitError&) {
    throw SizeLimitError("solveOptimalMechanism: profiles x allocations exceeds limit " +
                         std::to_string(opt.sizeLimit));
  }
  if (allocCount > opt.sizeLimit / std::max<std::uint64_t>(1, sol.profiles.size()))
    throw SizeLimitError("solveOptimalMechanism: profiles x allocations exceeds limit " +
                         std::to_string(opt.sizeLimit));
  sol.allocations.resize(allocCount);
  for (std::uint64_t a = 0; a < allocCount; ++a)
    detail::decodeAllocation(a, n, m, sol.allocations[a]);

  const std::size_t P = sol.profiles.size();
  const std::size_t A = sol.allocations.size();

  // payment caps; z variables exist only where the cap is positive
  std::vector<std::vector<std::vector<R>>> cap(P);
  LinearProgram<R> lp;
  std::vector<std::vector<int>> lamVar(P, std::vector<int>(A, -1));
  std::vector<std::vector<std::vector<int>>> zVar(P);

  std::vector<R> profileProb(P, R(1));
  for (std::size_t t = 0; t < P; ++t)
    for (int i = 0; i < n; ++i) profileProb[t] *= prior.bidders[i][sol.profiles[t][i]].probability;

  for (std::size_t t = 0; t < P; ++t) {
    cap[t].assign(A, std::vector<R>(n, R{}));
    zVar[t].assign(A, std::vector<int>(n, -1));
    for (std::size_t a = 0; a < A; ++a) {
      lamVar[t][a] = lp.addVar(R(0), std::nullopt, R{},
                               "lam_" + std::to_string(t) + "_" + std::to_string(a));
      for (int i = 0; i < n; ++i) {
        cap[t][a][i] = detail::paymentCap(prior.bidders[i][sol.profiles[t][i]],
                                          sol.allocations[a], i);
        if (cap[t][a][i] > R{})
          zVar[t][a][i] = lp.addVar(R(0), std::nullopt, profileProb[t],
                                    "z_" + std::to_string(t) + "_" + std::to_string(a) + "_" +
                                        std::to_string(i));
      }
    }
  }

  // lottery normalization
  for (std::size_t t = 0; t < P; ++t) {
    std::vector<std::pair<int, R>> row;
    for (std::size_t a = 0; a < A; ++a) row.emplace_back(lamVar[t][a], R(1));
    lp.addRow(std::move(row), Sense::EQ, R(1));
  }
  // payment-mass bounds z <= cap * lambda
  for (std::size_t t = 0; t < P; ++t)
    for (std::size_t a = 0; a < A; ++a)
      for (int i = 0; i < n; ++i)
        if (zVar[t][a][i] >= 0)
          lp.addRow({{zVar[t][a][i], R(1)}, {lamVar[t][a], -cap[t][a][i]}}, Sense::LE, R{});

  // interim utility of bidder i with true type ti reporting rep:
  // sum over profiles where i holds rep, of Pr[others] * (value_ti(a)*lambda - z)
  auto addUtilityTerms = [&](int i, int ti, int rep, const R& sign,
                             std::vector<std::pair<int, R>>& row) {
    const auto& trueType = prior.bidders[i][ti];
    for (std::size_t t = 0; t < P; ++t) {
      if (sol.profiles[t][i] != rep) continue;
      const R prOthers = profileProb[t] / prior.bidders[i][rep].probability;
      for (std::size_t a = 0; a < A; ++a) {
        const R v = detail::bidderBundleValue(trueType, sol.allocations[a], i);
        if (!(v == R{})) row.emplace_back(lamVar[t][a], sign * prOthers * v);
        if (zVar[t][a][i] >= 0) row.emplace_back(zVar[t][a][i], -sign * prOthers);
      }
    }
  };

  for (int i = 0; i < n; ++i) {
    const int types = sol.typeCounts[i];
    for (int ti = 0; ti < types; ++ti) {
      // interim IR (redundant given ex-post bounds, kept as documentation of
      // the definition)
      std::vector<std::pair<int, R>> ir;
      addUtilityTerms(i, ti, ti, R(1), ir);
      lp.addRow(std::move(ir), Sense::GE, R{});
      for (int rep = 0; rep < types; ++rep) {
        if (rep == ti) continue;
        if (mode == BicMode::BudgetDownward &&
            prior.bidders[i][rep].budget > prior.bidders[i][ti].budget)
          continue;
        std::vector<std::pair<int, R>> row;
        addUtilityTerms(i, ti, ti, R(1), row);
        addUtilityTerms(i, ti, rep, R(-1), row);
        lp.addRow(std::move(row), Sense::GE, R{});
      }
    }
  }

  const auto lpSol = solveLp(lp, opt.lp);
  if (lpSol.status != LpStatus::Optimal)
    throw std::logic_error("solveOptimalMechanism: LP not optimal (the null mechanism is feasible)");

  sol.lambda.assign(P, std::vector<R>(A, R{}));
  sol.paymentMass.assign(P, {});
  for (std::size_t t = 0; t < P; ++t) {
    sol.paymentMass[t].assign(A, std::vector<R>(n, R{}));
    for (std::size_t a = 0; a < A; ++a) {
      R lam = lpSol.values[lamVar[t][a]];
      if (lam < R{}) lam = R{};
      sol.lambda[t][a] = lam;
      for (int i = 0; i < n; ++i)
        if (zVar[t][a][i] >= 0) {
          R z = lpSol.values[zVar[t][a][i]];
          if (z < R{}) z = R{};
          sol.paymentMass[t][a][i] = z;
        }
    }
  }
  computeInterimForms(prior, sol);
  return sol;
}

/// One violated Bayesian incentive constraint.
template <class R>
struct BicViolation {
  int bidder;
  int type;
  int misreport;
  R slack;  // truthful utility minus misreport utility; negative = violated
};

template <class R>
std::vector<BicViolation<R>> checkBic(const MechanismSolution<R>& sol, const Prior<R>& prior,
                                      BicMode mode, const R& tol) {
  MechanismSolution<R> work = sol;
  computeInterimForms(prior, work);
  std::vector<BicViolation<R>> out;
  for (int i = 0; i < prior.bidderCount(); ++i) {
    const int types = static_cast<int>(prior.bidders[i].size());
    for (int ti = 0; ti < types; ++ti) {
      const auto& trueType = prior.bidders[i][ti];
      auto utility = [&](int rep) {
        R u{};
        for (int j = 0; j < prior.items; ++j)
          u += trueType.values[j] * work.interimAlloc[i][rep][j];
        return u - work.interimPay[i][rep];
      };
      const R truthful = utility(ti);
      for (int rep = 0; rep < types; ++rep) {
        if (rep == ti) continue;
        if (mode == BicMode::BudgetDownward &&
            prior.bidders[i][rep].budget > prior.bidders[i][ti].budget)
          continue;
        const R slack = truthful - utility(rep);
        if (slack < -tol) out.push_back({i, ti, rep, slack});
      }
    }
  }
  return out;
}

/// One violated ex-post condition on a lottery support point.
template <class R>
struct ExPostViolation {
  enum Kind { NegativePayment, PaymentAboveCap, NegativeLottery, LotteryNotNormalized };
  Kind kind;
  int profile;
  int alloc;   // -1 for profile-level violations
  int bidder;  // -1 when not bidder-specific
  R amount;
};

template <class R>
std::vector<ExPostViolation<R>> checkExPost(const MechanismSolution<R>& sol,
                                            const Prior<R>& prior, const R& tol) {
  using V = ExPostViolation<R>;
  std::vector<V> out;
  const int n = prior.bidderCount();
  for (std::size_t t = 0; t < sol.profiles.size(); ++t) {
    R lamSum{};
    for (std::size_t a = 0; a < sol.allocations.size(); ++a) {
      const R& lam = sol.lambda[t][a];
      lamSum += lam;
      if (lam < -tol)
        out.push_back({V::NegativeLottery, static_cast<int>(t), static_cast<int>(a), -1, lam});
      for (int i = 0; i < n; ++i) {
        const R& z = sol.paymentMass[t][a][i];
        if (z < -tol)
          out.push_back({V::NegativePayment, static_cast<int>(t), static_cast<int>(a), i, z});
        const R capV = detail::paymentCap(prior.bidders[i][sol.profiles[t][i]],
                                          sol.allocations[a], i);
        const R excess = z - lam * capV;
        if (excess > tol)
          out.push_back({V::PaymentAboveCap, static_cast<int>(t), static_cast<int>(a), i, excess});
      }
    }
    const R err = lamSum > R(1) ? lamSum - R(1) : R(1) - lamSum;
    if (err > tol) out.push_back({V::LotteryNotNormalized, static_cast<int>(t), -1, -1, err});
  }
  return out;
}

/// Phase Two of the two-phase format: sample a virtual mapping, build the
/// induced BAVWM instance from the reported profile, maximize virtual
/// welfare with the chosen solver, and charge min{budget, bundle value} to
/// bidders with a positive sampled multiplier.
template <class R>
std::pair<Allocation, PriceVector<R>> runVirtualWelfareMechanism(
    const Prior<R>& prior, const MappingDistribution<R>& delta,
    const std::vector<int>& profileTypes, std::uint64_t seed, Method solver) {
  const auto bad = validatePrior(prior);
  if (!bad.empty()) throw std::invalid_argument("runVirtualWelfareMechanism: " + bad.front());
  const int n = prior.bidderCount();
  if (static_cast<int>(profileTypes.size()) != n)
    throw std::invalid_argument("runVirtualWelfareMechanism: profile length != bidder count");
  for (int i = 0; i < n; ++i)
    if (profileTypes[i] < 0 || profileTypes[i] >= static_cast<int>(prior.bidders[i].size()))
      throw std::invalid_argument("runVirtualWelfareMechanism: reported type off-support for bidder " +
                                  std::to_string(i + 1));
  if (delta.entries.empty())
    throw std::invalid_argument("runVirtualWelfareMechanism: empty mapping distribution");
  R weightSum{};
  for (const auto& e : delta.entries) {
    if (!(e.weight > R{}))
      throw std::invalid_argument("runVirtualWelfareMechanism: nonpositive mapping weight");
    const auto mb = validateMapping(prior, e.mapping);
    if (!mb.empty()) throw std::invalid_argument("runVirtualWelfareMechanism: " + mb.front());
    weightSum += e.weight;
  }
  if (!Num<R>::eq(weightSum, R(1)))
    throw std::invalid_argument("runVirtualWelfareMechanism: mapping weights do not sum to 1");

  // deterministic sampling: raw mt19937_64 bits, not distribution objects
  std::mt19937_64 gen(seed);
  const double u01 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  const R threshold = Num<R>::fromDouble(u01) * weightSum;
  std::size_t pick = delta.entries.size() - 1;
  R cum{};
  for (std::size_t e = 0; e < delta.entries.size(); ++e) {
    cum += delta.entries[e].weight;
    if (threshold < cum) {
      pick = e;
      break;
    }
  }
  const VirtualMapping<R>& mapping = delta.entries[pick].mapping;

  BavwmInstance<R> inst;
  inst.agents = n;
  inst.items = prior.items;
  inst.values.resize(n);
  inst.virtualValues.resize(n);
  inst.budgets.resize(n);
  inst.multipliers.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& ty = prior.bidders[i][profileTypes[i]];
    inst.values[i] = ty.values;
    inst.budgets[i] = ty.budget;
    inst.multipliers[i] = mapping.multipliers[i][profileTypes[i]];
    inst.virtualValues[i] = mapping.virtualValues[i][profileTypes[i]];
  }
  const BavwmResult<R> res =
      solver == Method::Exact ? solveExact(inst) : solveApprox<R>(inst);
  return {res.allocation, res.prices};
}

/// Single-item case: the allocation space collapses to n+1 outcomes and the
/// LP is exact with no additive error. Solved in the budget-downward setting
/// (overreported budgets are self-punishing), which is the setting where
/// budget-capped posted prices are incentive compatible.
template <class R>
MechanismSolution<R> solveSingleItemOptimal(const Prior<R>& prior,
                                            const MechanismOptions& opt = {}) {
  if (prior.items != 1)
    throw std::invalid_argument("solveSingleItemOptimal: prior must have exactly one item");
  return solveOptimalMechanism(prior, BicMode::BudgetDownward, opt);
}

}  // namespace bauc
