#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bauc/numeric.hpp"

namespace bauc {

enum class Sense { LE, EQ, GE };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Dense-friendly LP in maximization form. Bounds are per-variable with
/// nullopt meaning unbounded on that side.
template <class R>
struct LinearProgram {
  int numVars = 0;
  std::vector<std::optional<R>> lower;
  std::vector<std::optional<R>> upper;

  struct Row {
    std::vector<std::pair<int, R>> coeffs;
    Sense sense = Sense::LE;
    R rhs{};
  };
  std::vector<Row> rows;
  std::vector<R> objective;
  std::vector<std::string> names;  // optional, used by dumpLp

  int addVar(std::optional<R> lo, std::optional<R> up, R obj, std::string name = {}) {
    lower.push_back(std::move(lo));
    upper.push_back(std::move(up));
    objective.push_back(std::move(obj));
    names.push_back(name.empty() ? "x" + std::to_string(numVars) : std::move(name));
    return numVars++;
  }

  void addRow(std::vector<std::pair<int, R>> coeffs, Sense sense, R rhs) {
    rows.push_back(Row{std::move(coeffs), sense, std::move(rhs)});
  }
};

template <class R>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<R> values;
  R objectiveValue{};
  bool verified = false;  // re-substitution check: feasible and objective attained
  long pivots = 0;
};

struct SimplexOptions {
  std::size_t exactCellLimit = 8'000'000;  // EXACT mode tableau cap (cells)
  long maxPivots = 500'000;
};

template <class R>
std::vector<std::string> validateLp(const LinearProgram<R>& lp) {
  std::vector<std::string> out;
  if (static_cast<int>(lp.lower.size()) != lp.numVars ||
      static_cast<int>(lp.upper.size()) != lp.numVars)
    out.push_back("bounds arrays do not match numVars");
  if (static_cast<int>(lp.objective.size()) != lp.numVars)
    out.push_back("objective array does not match numVars");
  for (int j = 0; j < lp.numVars; ++j) {
    if (lp.lower[j] && lp.upper[j] && *lp.lower[j] > *lp.upper[j])
      out.push_back("variable " + std::to_string(j) + ": lower > upper");
  }
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    for (const auto& [j, c] : lp.rows[r].coeffs) {
      (void)c;
      if (j < 0 || j >= lp.numVars)
        out.push_back("row " + std::to_string(r) + ": bad variable index " + std::to_string(j));
    }
  }
  return out;
}

template <class R>
R evaluateObjective(const LinearProgram<R>& lp, const std::vector<R>& x) {
  R v{};
  for (int j = 0; j < lp.numVars; ++j) v += lp.objective[j] * x[j];
  return v;
}

/// Largest constraint/bound violation of x (0 means feasible).
template <class R>
R feasibilityError(const LinearProgram<R>& lp, const std::vector<R>& x) {
  R worst{};
  auto bump = [&](const R& v) {
    if (v > worst) worst = v;
  };
  for (const auto& row : lp.rows) {
    R lhs{};
    for (const auto& [j, c] : row.coeffs) lhs += c * x[j];
    if (row.sense == Sense::LE) bump(lhs - row.rhs);
    if (row.sense == Sense::GE) bump(row.rhs - lhs);
    if (row.sense == Sense::EQ) bump(lhs >= row.rhs ? lhs - row.rhs : row.rhs - lhs);
  }
  for (int j = 0; j < lp.numVars; ++j) {
    if (lp.lower[j]) bump(*lp.lower[j] - x[j]);
    if (lp.upper[j]) bump(x[j] - *lp.upper[j]);
  }
  return worst;
}

/// Number of tight constraints plus tight bounds at x; a vertex has at least
/// numVars of them.
template <class R>
int tightCount(const LinearProgram<R>& lp, const std::vector<R>& x) {
  int tight = 0;
  for (const auto& row : lp.rows) {
    R lhs{};
    for (const auto& [j, c] : row.coeffs) lhs += c * x[j];
    if (Num<R>::eq(lhs, row.rhs)) ++tight;
  }
  for (int j = 0; j < lp.numVars; ++j) {
    if (lp.lower[j] && Num<R>::eq(x[j], *lp.lower[j])) ++tight;
    else if (lp.upper[j] && Num<R>::eq(x[j], *lp.upper[j])) ++tight;
  }
  return tight;
}

namespace detail {

// Two-phase dense tableau simplex over nonnegative variables. Entering rule
// is Dantzig with lowest-index ties; after a stall streak it switches to
// Bland's rule, which guarantees termination.
template <class R>
class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram<R>& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    buildVarMap();
    buildRows();
  }

  LpSolution<R> run() {
    LpSolution<R> sol;
    if (boundsInconsistent_) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    if (Num<R>::exact) {
      const std::size_t cells = tableau_.size() * (numCols_ + 1);
      if (cells > opt_.exactCellLimit)
        throw SizeLimitError("solveLp: exact-mode tableau of " + std::to_string(cells) +
                             " cells exceeds limit " + std::to_string(opt_.exactCellLimit));
    }
    if (!phase1()) {
      sol.status = LpStatus::Infeasible;
      sol.pivots = pivots_;
      return sol;
    }
    const bool bounded = phase2();
    sol.pivots = pivots_;
    if (!bounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.values = extract();
    sol.objectiveValue = evaluateObjective(lp_, sol.values);
    sol.verified = !(feasibilityError(lp_, sol.values) > Num<R>::tol());
    return sol;
  }

 private:
  enum class VarKind { ShiftLo, NegUp, Free };
  struct VarMap {
    VarKind kind;
    int col = -1, col2 = -1;
    R shift{};
  };

  void buildVarMap() {
    varMap_.resize(lp_.numVars);
    for (int j = 0; j < lp_.numVars; ++j) {
      const auto& lo = lp_.lower[j];
      const auto& up = lp_.upper[j];
      if (lo && up && *lo > *up) boundsInconsistent_ = true;
      VarMap m;
      if (lo) {
        m.kind = VarKind::ShiftLo;
        m.shift = *lo;
        m.col = numStruct_++;
      } else if (up) {
        m.kind = VarKind::NegUp;
        m.shift = *up;
        m.col = numStruct_++;
      } else {
        m.kind = VarKind::Free;
        m.col = numStruct_++;
        m.col2 = numStruct_++;
      }
      varMap_[j] = m;
    }
  }

  // Dense row in transformed space plus its rhs and original sense.
  void buildRows() {
    struct TmpRow {
      std::vector<R> a;
      R rhs{};
      Sense sense;
    };
    std::vector<TmpRow> tmp;
    auto addCoeff = [&](std::vector<R>& a, int var, const R& c, R& rhs) {
      const VarMap& m = varMap_[var];
      switch (m.kind) {
        case VarKind::ShiftLo:
          a[m.col] += c;
          rhs -= c * m.shift;
          break;
        case VarKind::NegUp:
          a[m.col] -= c;
          rhs -= c * m.shift;
          break;
        case VarKind::Free:
          a[m.col] += c;
          a[m.col2] -= c;
          break;
      }
    };
    for (const auto& row : lp_.rows) {
      TmpRow t;
      t.a.assign(numStruct_, R{});
      t.rhs = row.rhs;
      t.sense = row.sense;
      for (const auto& [j, c] : row.coeffs) addCoeff(t.a, j, c, t.rhs);
      tmp.push_back(std::move(t));
    }
    // two-sided variables get an upper-bound row in transformed space
    for (int j = 0; j < lp_.numVars; ++j) {
      if (lp_.lower[j] && lp_.upper[j]) {
        TmpRow t;
        t.a.assign(numStruct_, R{});
        t.a[varMap_[j].col] = R(1);
        t.rhs = *lp_.upper[j] - *lp_.lower[j];
        t.sense = Sense::LE;
        tmp.push_back(std::move(t));
      }
    }

    const int numRows = static_cast<int>(tmp.size());
    numSlack_ = 0;
    for (const auto& t : tmp)
      if (t.sense != Sense::EQ) ++numSlack_;

    // column layout: structural | slacks | artificials (appended on demand)
    numCols_ = numStruct_ + numSlack_;
    tableau_.assign(numRows, std::vector<R>());
    basis_.assign(numRows, -1);
    rowActive_.assign(numRows, true);

    int slackAt = numStruct_;
    std::vector<int> slackCol(numRows, -1), slackSign(numRows, 0);
    for (int r = 0; r < numRows; ++r) {
      if (tmp[r].sense != Sense::EQ) {
        slackCol[r] = slackAt++;
        slackSign[r] = tmp[r].sense == Sense::LE ? 1 : -1;
      }
    }
    std::vector<int> needArt;
    for (int r = 0; r < numRows; ++r) {
      const bool neg = tmp[r].rhs < R{};
      const int sign = neg ? -1 : 1;
      if (slackCol[r] < 0 || slackSign[r] * sign != 1) needArt.push_back(r);
    }
    numArt_ = static_cast<int>(needArt.size());
    const int total = numCols_ + numArt_;
    artStart_ = numCols_;

    int artAt = artStart_;
    std::vector<int> artCol(numRows, -1);
    for (int r : needArt) artCol[r] = artAt++;

    for (int r = 0; r < numRows; ++r) {
      auto& row = tableau_[r];
      row.assign(total + 1, R{});
      const bool neg = tmp[r].rhs < R{};
      for (int c = 0; c < numStruct_; ++c) row[c] = neg ? -tmp[r].a[c] : tmp[r].a[c];
      if (slackCol[r] >= 0) row[slackCol[r]] = R(neg ? -slackSign[r] : slackSign[r]);
      row[total] = neg ? -tmp[r].rhs : tmp[r].rhs;
      if (artCol[r] >= 0) {
        row[artCol[r]] = R(1);
        basis_[r] = artCol[r];
      } else {
        basis_[r] = slackCol[r];
      }
    }
    numCols_ = total;
  }

  int chooseEntering(const std::vector<R>& d, bool bland) const {
    const R tol = Num<R>::tol();
    int best = -1;
    for (int j = 0; j < numCols_; ++j) {
      if (!colAllowed_[j]) continue;
      if (d[j] > tol) {
        if (bland) return j;
        if (best == -1 || d[j] > d[best]) best = j;
      }
    }
    return best;
  }

  int chooseLeaving(int s, bool bland) const {
    const R ptol = Num<R>::pivotTol();
    int best = -1;
    R bestRatio{};
    for (std::size_t r = 0; r < tableau_.size(); ++r) {
      if (!rowActive_[r]) continue;
      const R& a = tableau_[r][s];
      if (!(a > ptol)) continue;
      R ratio = tableau_[r][numCols_] / a;
      if (best == -1 || ratio < bestRatio ||
          (bland && ratio == bestRatio && basis_[r] < basis_[best])) {
        best = static_cast<int>(r);
        bestRatio = ratio;
      }
    }
    return best;
  }

  void pivot(int r, int s) {
    auto& prow = tableau_[r];
    const R inv = R(1) / prow[s];
    for (int j = 0; j <= numCols_; ++j) prow[j] *= inv;
    prow[s] = R(1);
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (static_cast<int>(i) == r || !rowActive_[i]) continue;
      auto& row = tableau_[i];
      const R f = row[s];
      if (f == R{}) continue;
      for (int j = 0; j <= numCols_; ++j) row[j] -= f * prow[j];
      row[s] = R{};
    }
    basis_[r] = s;
    ++pivots_;
  }

  // maximizes cost over the current tableau; returns false if unbounded
  bool optimize(const std::vector<R>& cost) {
    std::vector<R> d;
    R z{};
    // d_j = c_j - sum_i c_B(i) * T[i][j]; z = sum_i c_B(i) * rhs_i
    d.assign(numCols_, R{});
    for (int j = 0; j < numCols_; ++j) d[j] = cost[j];
    for (std::size_t r = 0; r < tableau_.size(); ++r) {
      if (!rowActive_[r]) continue;
      const R cb = cost[basis_[r]];
      if (cb == R{}) continue;
      const auto& row = tableau_[r];
      for (int j = 0; j < numCols_; ++j)
        if (!(row[j] == R{})) d[j] -= cb * row[j];
      z += cb * row[numCols_];
    }

    bool bland = false;
    long stall = 0;
    const long stallLimit = 3 * (static_cast<long>(tableau_.size()) + numCols_) + 20;
    while (true) {
      const int s = chooseEntering(d, bland);
      if (s < 0) return true;
      const int r = chooseLeaving(s, bland);
      if (r < 0) return false;
      if (pivots_ >= opt_.maxPivots)
        throw std::runtime_error("solveLp: pivot limit exceeded");
      const R ds = d[s];
      const R gain = ds * tableau_[r][numCols_] / tableau_[r][s];
      pivot(r, s);
      // maintain reduced costs by the same elimination
      const auto& prow = tableau_[r];
      for (int j = 0; j < numCols_; ++j)
        if (!(prow[j] == R{})) d[j] -= ds * prow[j];
      d[s] = R{};
      z += gain;
      if (gain > R{}) {
        stall = 0;
      } else if (!bland && ++stall > stallLimit) {
        bland = true;
      }
    }
  }

  bool phase1() {
    colAllowed_.assign(numCols_, true);
    if (numArt_ == 0) return true;
    std::vector<R> cost(numCols_, R{});
    for (int j = artStart_; j < numCols_; ++j) cost[j] = R(-1);
    const bool ok = optimize(cost);
    assert(ok);
    (void)ok;
    // infeasible iff some artificial remains positive
    R artSum{};
    for (std::size_t r = 0; r < tableau_.size(); ++r)
      if (rowActive_[r] && basis_[r] >= artStart_) artSum += tableau_[r][numCols_];
    if (artSum > Num<R>::tol()) return false;
    // drive remaining basic artificials out (degenerate) or deactivate rows
    for (std::size_t r = 0; r < tableau_.size(); ++r) {
      if (!rowActive_[r] || basis_[r] < artStart_) continue;
      int s = -1;
      for (int j = 0; j < artStart_; ++j) {
        const R& a = tableau_[r][j];
        if (a > Num<R>::pivotTol() || -a > Num<R>::pivotTol()) {
          s = j;
          break;
        }
      }
      if (s >= 0)
        pivot(static_cast<int>(r), s);
      else
        rowActive_[r] = false;  // redundant constraint
    }
    return true;
  }

  bool phase2() {
    for (int j = artStart_; j < numCols_; ++j) colAllowed_[j] = false;
    std::vector<R> cost(numCols_, R{});
    for (int j = 0; j < lp_.numVars; ++j) {
      const VarMap& m = varMap_[j];
      const R& c = lp_.objective[j];
      switch (m.kind) {
        case VarKind::ShiftLo: cost[m.col] += c; break;
        case VarKind::NegUp: cost[m.col] -= c; break;
        case VarKind::Free:
          cost[m.col] += c;
          cost[m.col2] -= c;
          break;
      }
    }
    return optimize(cost);
  }

  std::vector<R> extract() const {
    std::vector<R> y(numCols_, R{});
    for (std::size_t r = 0; r < tableau_.size(); ++r)
      if (rowActive_[r]) y[basis_[r]] = tableau_[r][numCols_];
    std::vector<R> x(lp_.numVars, R{});
    for (int j = 0; j < lp_.numVars; ++j) {
      const VarMap& m = varMap_[j];
      switch (m.kind) {
        case VarKind::ShiftLo: x[j] = m.shift + y[m.col]; break;
        case VarKind::NegUp: x[j] = m.shift - y[m.col]; break;
        case VarKind::Free: x[j] = y[m.col] - y[m.col2]; break;
      }
    }
    return x;
  }

  const LinearProgram<R>& lp_;
  SimplexOptions opt_;
  std::vector<VarMap> varMap_;
  std::vector<std::vector<R>> tableau_;
  std::vector<int> basis_;
  std::vector<bool> rowActive_;
  std::vector<bool> colAllowed_;
  bool boundsInconsistent_ = false;
  int numStruct_ = 0, numSlack_ = 0, numArt_ = 0, artStart_ = 0, numCols_ = 0;
  long pivots_ = 0;
};

}  // namespace detail

template <class R>
LpSolution<R> solveLp(const LinearProgram<R>& lp, const SimplexOptions& opt = {}) {
  const auto bad = validateLp(lp);
  if (!bad.empty()) throw std::invalid_argument("solveLp: malformed LP: " + bad.front());
  detail::DenseSimplex<R> simplex(lp, opt);
  return simplex.run();
}

template <class R>
void dumpLp(const LinearProgram<R>& lp, std::ostream& os) {
  auto term = [&](const R& c, int j) {
    return Num<R>::str(c) + " " + lp.names[j];
  };
  os << "maximize:";
  bool first = true;
  for (int j = 0; j < lp.numVars; ++j) {
    if (lp.objective[j] == R{}) continue;
    os << (first ? " " : " + ") << term(lp.objective[j], j);
    first = false;
  }
  if (first) os << " 0";
  os << "\nsubject to:\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    os << "  r" << r << ":";
    bool f2 = true;
    for (const auto& [j, c] : lp.rows[r].coeffs) {
      os << (f2 ? " " : " + ") << term(c, j);
      f2 = false;
    }
    if (f2) os << " 0";
    const char* rel = lp.rows[r].sense == Sense::LE ? "<=" : lp.rows[r].sense == Sense::GE ? ">=" : "=";
    os << " " << rel << " " << Num<R>::str(lp.rows[r].rhs) << "\n";
  }
  os << "bounds:\n";
  for (int j = 0; j < lp.numVars; ++j) {
    os << "  ";
    if (!lp.lower[j] && !lp.upper[j]) {
      os << lp.names[j] << " free\n";
      continue;
    }
    if (lp.lower[j]) os << Num<R>::str(*lp.lower[j]) << " <= ";
    os << lp.names[j];
    if (lp.upper[j]) os << " <= " << Num<R>::str(*lp.upper[j]);
    os << "\n";
  }
}

}  // namespace bauc
