#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipfree/rational.hpp"

namespace lipfree {

enum class PivotRule { Bland, Dantzig };

/// LIPFREE_PIVOT=bland|dantzig selects the pivot rule. This is a performance
/// knob only: optimal objective values are unique, so no computed value ever
/// depends on it (certificates may differ between equally optimal bases; the
/// CLI records the rule in its manifest).
inline PivotRule pivot_rule_from_env() {
  static PivotRule rule = [] {
    const char* env = std::getenv("LIPFREE_PIVOT");
    if (env && std::string(env) == "bland") return PivotRule::Bland;
    return PivotRule::Dantzig;
  }();
  return rule;
}

/// maximize c^T x  subject to  A x = b,  x >= 0.
/// Rows may carry b of any sign; the solver normalizes.
struct LpProblem {
  std::vector<std::vector<Rat>> A;
  std::vector<Rat> b;
  std::vector<Rat> c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status;
  Rat objective;
  std::vector<Rat> x;
};

namespace detail {

/// Dense exact-rational tableau for the two-phase primal simplex. Dantzig
/// pricing switches permanently to Bland after a stretch of degenerate
/// pivots, so every solve terminates.
class Tableau {
 public:
  Tableau(std::vector<std::vector<Rat>> rows, std::vector<int> basis,
          std::size_t cols, PivotRule rule)
      : rows_(std::move(rows)),
        basis_(std::move(basis)),
        cols_(cols),
        rule_(rule),
        stall_limit_(3 * (rows_.size() + cols) + 16) {}

  // red: reduced-cost row of size cols_+1 (last entry = objective value,
  // stored negated so that pivoting updates it like any other row).
  void optimize(std::vector<Rat>& red, std::size_t allowed_cols) {
    std::size_t stall = 0;
    bool bland = rule_ == PivotRule::Bland;
    for (;;) {
      int enter = pick_entering(red, allowed_cols, bland);
      if (enter < 0) return;
      int leave = pick_leaving(static_cast<std::size_t>(enter));
      if (leave < 0) throw Unbounded{};
      bool degenerate = rows_[leave][cols_] == 0;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter), red);
      if (!bland) {
        stall = degenerate ? stall + 1 : 0;
        if (stall > stall_limit_) bland = true;
      }
    }
  }

  struct Unbounded {};

  void pivot(std::size_t row, std::size_t col, std::vector<Rat>& red) {
    Rat inv = Rat(1) / rows_[row][col];
    for (Rat& v : rows_[row]) v *= inv;
    rows_[row][col] = 1;  // kill residue from the normalization
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == row || rows_[i][col] == 0) continue;
      Rat factor = rows_[i][col];
      for (std::size_t j = 0; j <= cols_; ++j) rows_[i][j] -= factor * rows_[row][j];
      rows_[i][col] = 0;
    }
    if (red[col] != 0) {
      Rat factor = red[col];
      for (std::size_t j = 0; j <= cols_; ++j) red[j] -= factor * rows_[row][j];
      red[col] = 0;
    }
    basis_[row] = static_cast<int>(col);
  }

  std::vector<std::vector<Rat>>& rows() { return rows_; }
  std::vector<int>& basis() { return basis_; }
  std::size_t cols() const { return cols_; }

 private:
  int pick_entering(const std::vector<Rat>& red, std::size_t allowed_cols,
                    bool bland) const {
    int best = -1;
    for (std::size_t j = 0; j < allowed_cols; ++j) {
      if (red[j] <= 0) continue;
      if (bland) return static_cast<int>(j);
      if (best < 0 || red[j] > red[best]) best = static_cast<int>(j);
    }
    return best;
  }

  int pick_leaving(std::size_t col) const {
    int best = -1;
    Rat best_ratio;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i][col] <= 0) continue;
      Rat ratio = rows_[i][cols_] / rows_[i][col];
      if (best < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis_[i] < basis_[best])) {
        best = static_cast<int>(i);
        best_ratio = ratio;
      }
    }
    return best;
  }

  std::vector<std::vector<Rat>> rows_;
  std::vector<int> basis_;
  std::size_t cols_;
  PivotRule rule_;
  std::size_t stall_limit_;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& problem,
                           PivotRule rule = pivot_rule_from_env()) {
  const std::size_t m = problem.A.size();
  const std::size_t n = problem.c.size();
  if (problem.b.size() != m)
    throw std::invalid_argument("solve_lp: b size mismatch");
  for (const auto& row : problem.A)
    if (row.size() != n) throw std::invalid_argument("solve_lp: A width mismatch");

  // Columns: n structural + m artificial, then RHS.
  const std::size_t total = n + m;
  std::vector<std::vector<Rat>> rows(m, std::vector<Rat>(total + 1, Rat(0)));
  std::vector<int> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool flip = problem.b[i] < 0;
    for (std::size_t j = 0; j < n; ++j)
      rows[i][j] = flip ? Rat(-problem.A[i][j]) : problem.A[i][j];
    rows[i][total] = flip ? Rat(-problem.b[i]) : problem.b[i];
    rows[i][n + i] = 1;
    basis[i] = static_cast<int>(n + i);
  }

  detail::Tableau tab(std::move(rows), std::move(basis), total, rule);

  // Phase 1: maximize -sum(artificials). Reduced costs of structural columns
  // start at sum of their coefficients over all rows.
  std::vector<Rat> red(total + 1, Rat(0));
  for (std::size_t j = 0; j <= total; ++j) {
    Rat sum = 0;
    for (std::size_t i = 0; i < m; ++i) sum += tab.rows()[i][j];
    if (j < n || j == total) red[j] = sum;  // artificial columns price at 0
  }
  try {
    tab.optimize(red, n);
  } catch (detail::Tableau::Unbounded&) {
    throw std::logic_error("solve_lp: phase 1 cannot be unbounded");
  }
  if (red[total] != 0) return {LpStatus::Infeasible, Rat(0), {}};

  // Drive basic artificials out; rows that cannot pivot are redundant and
  // their artificial stays basic at zero with an all-zero structural row.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < static_cast<int>(n)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (tab.rows()[i][j] != 0) {
        tab.pivot(i, j, red);
        break;
      }
    }
  }

  // Phase 2 objective: red2[j] = c_j - c_B T[.][j]. Basic columns are identity
  // columns after pivoting, so their reduced costs come out zero on their own.
  std::vector<Rat> red2(total + 1, Rat(0));
  for (std::size_t j = 0; j < n; ++j) red2[j] = problem.c[j];
  for (std::size_t i = 0; i < m; ++i) {
    int bj = tab.basis()[i];
    if (bj >= static_cast<int>(n)) continue;  // redundant row, cost 0
    if (problem.c[bj] == 0) continue;
    Rat factor = problem.c[bj];
    for (std::size_t j = 0; j <= total; ++j)
      red2[j] -= factor * tab.rows()[i][j];
  }

  try {
    tab.optimize(red2, n);
  } catch (detail::Tableau::Unbounded&) {
    return {LpStatus::Unbounded, Rat(0), {}};
  }

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.assign(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i) {
    int bj = tab.basis()[i];
    if (bj < static_cast<int>(n)) sol.x[bj] = tab.rows()[i][tab.cols()];
  }
  sol.objective = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (sol.x[j] != 0) sol.objective += problem.c[j] * sol.x[j];
  return sol;
}

}  // namespace lipfree
