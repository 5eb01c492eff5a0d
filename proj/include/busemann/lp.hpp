// Dense two-phase simplex with Bland's rule, for the small box-bounded
// programs produced by the cutting-plane loop: maximize c.v subject to
// row.v <= rhs and lo <= v <= up.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace busemann {

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // maximize
  std::vector<std::pair<std::vector<double>, double>> constraints;  // row.v <= rhs
  std::vector<double> box_lo, box_up;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> point;
  double value = 0.0;
  std::vector<int> active_set;  // constraint indices tight at the solution
};

namespace detail {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-8;
// Dual-feasibility acceptance threshold after a refactorization: reduced
// costs recomputed from the original data carry rounding of the same order
// as the tableau entries, and degenerate pivots on noise-level reduced
// costs cycle instead of making progress.
constexpr double kDualTol = 1e-8;
// Post-solve sanity threshold: large tableaus (hundreds of cut rows)
// legitimately accumulate a few hundred ulps of pivot rounding, so only
// substantive violations are treated as solver failures.
constexpr double kPostTol = 1e-6;

// Dense LU with partial pivoting, reusable across right-hand sides;
// factor() returns false on (near) singularity.
class LuFactor {
 public:
  bool factor(std::vector<std::vector<double>> a) {
    n_ = static_cast<int>(a.size());
    perm_.resize(n_);
    for (int k = 0; k < n_; ++k) {
      int piv = k;
      for (int i = k + 1; i < n_; ++i)
        if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
      if (std::abs(a[piv][k]) < 1e-300) return false;
      std::swap(a[k], a[piv]);
      perm_[k] = piv;
      for (int i = k + 1; i < n_; ++i) {
        a[i][k] /= a[k][k];
        const double f = a[i][k];
        if (f == 0.0) continue;
        for (int j = k + 1; j < n_; ++j) a[i][j] -= f * a[k][j];
      }
    }
    lu_ = std::move(a);
    return true;
  }

  void solve(std::vector<double>& b) const {
    // L is stored in final (fully permuted) row positions, so apply the
    // whole permutation to b before the triangular solves.
    for (int k = 0; k < n_; ++k) std::swap(b[k], b[perm_[k]]);
    for (int k = 0; k < n_; ++k)
      for (int i = k + 1; i < n_; ++i) b[i] -= lu_[i][k] * b[k];
    for (int k = n_ - 1; k >= 0; --k) {
      for (int j = k + 1; j < n_; ++j) b[k] -= lu_[k][j] * b[j];
      b[k] /= lu_[k][k];
    }
  }

 private:
  int n_ = 0;
  std::vector<std::vector<double>> lu_;
  std::vector<int> perm_;
};

inline bool lu_solve(std::vector<std::vector<double>> a, std::vector<double>& b) {
  LuFactor lu;
  if (!lu.factor(std::move(a))) return false;
  lu.solve(b);
  return true;
}

class SimplexTableau {
 public:
  // rows: A x <= b with x >= 0 (b may be negative; phase 1 handles it).
  SimplexTableau(const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& rhs, const std::vector<double>& obj)
      : rows0_(rows), rhs0_(rhs), m_(static_cast<int>(rows.size())),
        n_(static_cast<int>(obj.size())) {
    // Column layout: [structural n_] [slacks m_] [artificials] [rhs].
    num_art_ = 0;
    for (int i = 0; i < m_; ++i)
      if (rhs[i] < 0.0) ++num_art_;
    cols_ = n_ + m_ + num_art_ + 1;
    t_.assign(m_ + 1, std::vector<double>(cols_, 0.0));
    basis_.resize(m_);

    int art = 0;
    for (int i = 0; i < m_; ++i) {
      const double s = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) t_[i][j] = s * rows[i][j];
      t_[i][n_ + i] = s;  // slack
      t_[i][cols_ - 1] = s * rhs[i];
      if (rhs[i] < 0.0) {
        t_[i][n_ + m_ + art] = 1.0;
        basis_[i] = n_ + m_ + art;
        art_row_.push_back(i);
        ++art;
      } else {
        basis_[i] = n_ + i;
      }
    }
    obj_ = obj;
  }

  LpStatus solve() {
    if (num_art_ > 0) {
      // Phase 1: minimize sum of artificials (as maximize the negation).
      in_phase1_ = true;
      std::vector<double>& z = t_[m_];
      std::fill(z.begin(), z.end(), 0.0);
      for (int j = n_ + m_; j < cols_ - 1; ++j) z[j] = -1.0;
      price_out();
      const LpStatus p1 = iterate(cols_ - 1, /*allow_refactor=*/true);
      in_phase1_ = false;
      if (p1 == LpStatus::unbounded) return LpStatus::infeasible;
      // The objective row carries the negated phase-1 value.
      if (z[cols_ - 1] > kFeasTol) return LpStatus::infeasible;
      // Drive any artificial still in the basis out or zero its row.
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] < n_ + m_) continue;
        int enter = -1;
        for (int j = 0; j < n_ + m_; ++j)
          if (std::abs(t_[i][j]) > kPivotTol) {
            enter = j;
            break;
          }
        if (enter >= 0) pivot(i, enter);
      }
    }
    // Phase 2; artificial columns are excluded from the entering rule.
    std::vector<double>& z = t_[m_];
    std::fill(z.begin(), z.end(), 0.0);
    for (int j = 0; j < n_; ++j) z[j] = obj_[j];
    price_out();
    double worst_dual = std::numeric_limits<double>::infinity();
    bool primal_ok = false;
    for (int round = 0; round < 8; ++round) {
      const LpStatus st = iterate(n_ + m_, /*allow_refactor=*/true);
      if (st != LpStatus::optimal) return st;
      // Rebuild from the original data and re-check both dual and primal
      // feasibility: the claimed optimum might rest on accumulated drift.
      if (!refactor()) return st;
      worst_dual = 0.0;
      for (int j = 0; j < n_ + m_; ++j) worst_dual = std::max(worst_dual, t_[m_][j]);
      primal_ok = true;
      for (int i = 0; i < m_; ++i)
        if (t_[i][cols_ - 1] < 0.0) primal_ok = false;
      if (primal_ok && worst_dual <= kDualTol) return LpStatus::optimal;
      bland_ = true;  // the Dantzig path looped back to this basis
      if (!primal_repair()) break;
    }
    // Degenerate vertices admit several bases whose recomputed reduced costs
    // disagree at rounding level; alternating between them never gets under
    // the strict tolerance. A primal-feasible basis with noise-level dual
    // infeasibility is the optimum for practical purposes.
    if (refactor()) {
      worst_dual = 0.0;
      for (int j = 0; j < n_ + m_; ++j) worst_dual = std::max(worst_dual, t_[m_][j]);
      primal_ok = true;
      for (int i = 0; i < m_; ++i)
        if (t_[i][cols_ - 1] < 0.0) primal_ok = false;
      if (primal_ok && worst_dual <= 1e-6) return LpStatus::optimal;
    }
    throw std::runtime_error("lp_solve: simplex failed to converge cleanly");
  }

  std::vector<double> extract(double* value) const {
    // The tableau rhs accumulates rounding over hundreds of pivots, so the
    // basic solution is recomputed from the original data with one fresh LU
    // solve of the basis system; the tableau values are only a fallback.
    std::vector<double> x(n_, 0.0);
    std::vector<std::vector<double>> basis_cols(m_, std::vector<double>(m_, 0.0));
    std::vector<double> z(m_);
    for (int i = 0; i < m_; ++i) {
      const double si = rhs0_[i] < 0.0 ? -1.0 : 1.0;
      z[i] = si * rhs0_[i];
      for (int k = 0; k < m_; ++k) {
        const int j = basis_[k];
        if (j < n_) {
          basis_cols[i][k] = si * rows0_[i][j];
        } else if (j < n_ + m_) {
          const int p = j - n_;
          basis_cols[i][k] = (i == p) ? (rhs0_[p] < 0.0 ? -1.0 : 1.0) : 0.0;
        } else {
          basis_cols[i][k] = (i == art_row_[j - n_ - m_]) ? 1.0 : 0.0;
        }
      }
    }
    if (lu_solve(std::move(basis_cols), z)) {
      for (int k = 0; k < m_; ++k)
        if (basis_[k] < n_) x[basis_[k]] = z[k];
    } else {
      for (int i = 0; i < m_; ++i)
        if (basis_[i] < n_) x[basis_[i]] = t_[i][cols_ - 1];
    }
    double v = 0.0;
    for (int j = 0; j < n_; ++j) v += obj_[j] * x[j];
    *value = v;
    return x;
  }

 private:
  void price_out() {
    std::vector<double>& z = t_[m_];
    for (int i = 0; i < m_; ++i) {
      const double c = z[basis_[i]];
      if (c == 0.0) continue;
      for (int j = 0; j < cols_; ++j) z[j] -= c * t_[i][j];
    }
  }

  void pivot(int row, int col) {
    const double p = t_[row][col];
    for (int j = 0; j < cols_; ++j) t_[row][j] /= p;
    for (int i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = t_[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < cols_; ++j) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  LpStatus iterate(int col_limit, bool allow_refactor = false) {
    int since_refactor = 0;
    for (;;) {
      if (allow_refactor && since_refactor >= 40) {
        refactor();
        since_refactor = 0;
      }
      // Columns already in the basis must never enter: their true reduced
      // cost is zero, and any residue left by a refactorization would only
      // trigger no-op self-pivots that mask genuine entering candidates.
      std::vector<char> in_basis(cols_ - 1, 0);
      for (int k = 0; k < m_; ++k) in_basis[basis_[k]] = 1;
      // Entering rule: Dantzig (most positive reduced cost) for speed and
      // stability; pure Bland after a pivot cap or once a degenerate cycle
      // was detected, as the anti-cycling net.
      int enter = -1;
      if (!bland_ && total_pivots_ < kBlandSwitch) {
        double best = kPivotTol;
        for (int j = 0; j < col_limit; ++j)
          if (!in_basis[j] && t_[m_][j] > best) {
            best = t_[m_][j];
            enter = j;
          }
      } else {
        for (int j = 0; j < col_limit; ++j)
          if (!in_basis[j] && t_[m_][j] > kPivotTol) {
            enter = j;
            break;
          }
      }
      if (enter < 0) return LpStatus::optimal;
      // Leaving rule: min ratio, but among near-ties take the largest pivot
      // element; pivots below kEligTol are a last resort only. Pivoting on
      // tiny entries is what lets rounding errors blow up the tableau.
      constexpr double kEligTol = 1e-7;
      int leave = -1;
      double best_ratio = 0.0;
      for (int pass = 0; pass < 2 && leave < 0; ++pass) {
        const double elig = pass == 0 ? kEligTol : kPivotTol;
        for (int i = 0; i < m_; ++i) {
          if (t_[i][enter] <= elig) continue;
          const double ratio = t_[i][cols_ - 1] / t_[i][enter];
          const bool tie = leave >= 0 &&
                           ratio < best_ratio + 1e-9 * (1.0 + std::abs(best_ratio));
          // In Bland mode, ties go to the smallest basis index so the
          // anti-cycling argument applies to both rule halves.
          if (leave < 0 || ratio < best_ratio - 1e-9 * (1.0 + std::abs(best_ratio)) ||
              (tie && (bland_ ? basis_[i] < basis_[leave]
                              : t_[i][enter] > t_[leave][enter])))
            leave = i, best_ratio = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
      ++total_pivots_;
      ++since_refactor;
    }
  }

  // Dual-simplex-style row pivots that drive substantially negative basic
  // variables out of the basis after a refactor exposed them. Dual
  // feasibility may regress; the caller re-runs primal iterations after.
  bool primal_repair() {
    for (int i = 0; i < m_; ++i) {
      if (t_[i][cols_ - 1] >= 0.0) continue;
      int enter = -1;
      double best = -1e-7;
      for (int j = 0; j < n_ + m_; ++j) {
        bool basic = false;
        for (int k = 0; k < m_; ++k)
          if (basis_[k] == j) {
            basic = true;
            break;
          }
        if (!basic && t_[i][j] < best) {
          best = t_[i][j];
          enter = j;
        }
      }
      if (enter < 0) return false;
      pivot(i, enter);
    }
    return true;
  }

  // Entry (i, j) of the scaled constraint matrix [S A | S | E_art].
  double scaled_col(int i, int j) const {
    const double si = rhs0_[i] < 0.0 ? -1.0 : 1.0;
    if (j < n_) return si * rows0_[i][j];
    if (j < n_ + m_) return i == j - n_ ? (rhs0_[i] < 0.0 ? -1.0 : 1.0) : 0.0;
    return i == art_row_[j - n_ - m_] ? 1.0 : 0.0;
  }

  // Rebuild the whole tableau for the current basis from the original data
  // (phase 2 objective). Tiny negative basic values left over from the
  // corrected drift are clamped to zero (degenerate vertex).
  bool refactor() {
    std::vector<std::vector<double>> basis_cols(m_, std::vector<double>(m_));
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < m_; ++k) basis_cols[i][k] = scaled_col(i, basis_[k]);
    LuFactor lu;
    if (!lu.factor(std::move(basis_cols))) return false;
    std::vector<double> col(m_);
    std::vector<std::vector<double>> fresh(m_, std::vector<double>(cols_, 0.0));
    for (int j = 0; j < cols_; ++j) {
      for (int i = 0; i < m_; ++i) {
        const double si = rhs0_[i] < 0.0 ? -1.0 : 1.0;
        col[i] = j == cols_ - 1 ? si * rhs0_[i] : scaled_col(i, j);
      }
      lu.solve(col);
      for (int i = 0; i < m_; ++i) fresh[i][j] = col[i];
    }
    for (int i = 0; i < m_; ++i) {
      t_[i] = std::move(fresh[i]);
      if (t_[i][cols_ - 1] < 0.0 && t_[i][cols_ - 1] > -1e-7) t_[i][cols_ - 1] = 0.0;
    }
    std::vector<double>& z = t_[m_];
    std::fill(z.begin(), z.end(), 0.0);
    if (in_phase1_) {
      for (int j = n_ + m_; j < cols_ - 1; ++j) z[j] = -1.0;
    } else {
      for (int j = 0; j < n_; ++j) z[j] = obj_[j];
    }
    price_out();
    // Basic reduced costs are exactly zero by definition; clear the
    // price-out residue so it cannot be mistaken for an entering candidate.
    for (int k = 0; k < m_; ++k) z[basis_[k]] = 0.0;
    return true;
  }

  std::vector<std::vector<double>> rows0_;
  std::vector<double> rhs0_;
  int m_, n_, num_art_ = 0, cols_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<int> basis_;
  std::vector<int> art_row_;
  std::vector<double> obj_;
  bool in_phase1_ = false;
  long total_pivots_ = 0;
  bool bland_ = false;
  static constexpr long kBlandSwitch = 20000;
};

}  // namespace detail

inline LpSolution lp_solve(const LinearProgram& p) {
  const int n = p.num_vars;
  if (n <= 0 || static_cast<int>(p.objective.size()) != n ||
      static_cast<int>(p.box_lo.size()) != n || static_cast<int>(p.box_up.size()) != n)
    throw std::invalid_argument("lp_solve: inconsistent dimensions");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(p.box_lo[j]) || !std::isfinite(p.box_up[j]) ||
        !std::isfinite(p.objective[j]))
      throw std::invalid_argument("lp_solve: non-finite input");
    if (p.box_lo[j] > p.box_up[j]) return {};
  }
  for (const auto& [row, rhs] : p.constraints) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("lp_solve: bad row size");
    if (!std::isfinite(rhs)) throw std::invalid_argument("lp_solve: non-finite input");
    for (double a : row)
      if (!std::isfinite(a)) throw std::invalid_argument("lp_solve: non-finite input");
  }

  // Shift to x = v - lo >= 0; upper bounds become ordinary rows. Rows are
  // equilibrated (divided by their largest entry) so that cuts generated at
  // very different scales do not wreck the tableau conditioning.
  const int m = static_cast<int>(p.constraints.size());
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.reserve(m + n);
  rhs.reserve(m + n);
  for (const auto& [row, b] : p.constraints) {
    double shift = 0.0, big = 0.0;
    for (int j = 0; j < n; ++j) {
      shift += row[j] * p.box_lo[j];
      big = std::max(big, std::abs(row[j]));
    }
    std::vector<double> r = row;
    double rb = b - shift;
    if (big > 0.0) {
      for (double& a : r) a /= big;
      rb /= big;
    }
    rows.push_back(std::move(r));
    rhs.push_back(rb);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> row(n, 0.0);
    row[j] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(p.box_up[j] - p.box_lo[j]);
  }

  detail::SimplexTableau tab(rows, rhs, p.objective);
  const LpStatus st = tab.solve();
  LpSolution sol;
  sol.status = st;
  if (st != LpStatus::optimal) return sol;

  double shifted_value = 0.0;
  std::vector<double> x = tab.extract(&shifted_value);
  sol.point.resize(n);
  double lo_term = 0.0;
  for (int j = 0; j < n; ++j) {
    sol.point[j] = p.box_lo[j] + x[j];
    lo_term += p.objective[j] * p.box_lo[j];
  }
  sol.value = shifted_value + lo_term;

  // Independent feasibility recheck of the returned point.
  for (int i = 0; i < m; ++i) {
    double lhs = 0.0, scale = 1.0 + std::abs(p.constraints[i].second);
    for (int j = 0; j < n; ++j) {
      lhs += p.constraints[i].first[j] * sol.point[j];
      // backward-error scale of this row in the shifted system the solver
      // actually worked with (v - lo >= 0)
      scale += std::abs(p.constraints[i].first[j]) *
               (std::abs(sol.point[j]) + std::abs(p.box_lo[j]));
    }
    if (lhs > p.constraints[i].second + detail::kPostTol * scale)
      throw std::runtime_error("lp_solve: post-solve feasibility check failed (relative violation " +
                               std::to_string((lhs - p.constraints[i].second) / scale) + ")");
    if (std::abs(lhs - p.constraints[i].second) <= detail::kFeasTol * scale)
      sol.active_set.push_back(i);
  }
  for (int j = 0; j < n; ++j)
    if (sol.point[j] < p.box_lo[j] - detail::kPostTol || sol.point[j] > p.box_up[j] + detail::kPostTol)
      throw std::runtime_error("lp_solve: box bound violated post-solve");
  return sol;
}

}  // namespace busemann
