#include "evcs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace evcs {

int LinearProgram::add_var(std::string name, double obj, double ub) {
  if (!std::isfinite(obj)) throw std::invalid_argument("objective coefficient must be finite");
  if (ub < 0 || std::isnan(ub)) throw std::invalid_argument("upper bound must be >= 0");
  c.push_back(obj);
  upper.push_back(ub);
  names.push_back(std::move(name));
  return n_vars() - 1;
}

void LinearProgram::add_row(const std::vector<std::pair<int, double>>& terms, double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("rhs must be finite");
  std::vector<double> row(n_vars(), 0.0);
  for (auto [j, v] : terms) {
    if (j < 0 || j >= n_vars()) throw std::invalid_argument("row references unknown variable");
    if (!std::isfinite(v)) throw std::invalid_argument("row coefficient must be finite");
    row[j] += v;
  }
  rows.push_back(std::move(row));
  b.push_back(rhs);
}

void LinearProgram::dump(std::ostream& out) const {
  out << "max";
  for (int j = 0; j < n_vars(); ++j)
    if (c[j] != 0) out << ' ' << (c[j] >= 0 ? "+" : "") << c[j] << ' ' << names[j];
  out << "\nsubject to\n";
  for (int i = 0; i < n_rows(); ++i) {
    out << "  r" << i << ':';
    for (int j = 0; j < n_vars(); ++j)
      if (rows[i][j] != 0) out << ' ' << (rows[i][j] >= 0 ? "+" : "") << rows[i][j] << ' ' << names[j];
    out << " <= " << b[i] << '\n';
  }
  for (int j = 0; j < n_vars(); ++j) {
    out << "  0 <= " << names[j];
    if (upper[j] != kLpInf) out << " <= " << upper[j];
    out << '\n';
  }
}

namespace {

constexpr double kEps = 1e-9;
constexpr double kFeasTol = 1e-7;

// Full-tableau simplex over 0 <= x <= u with the upper-bound flip
// substitution: every nonbasic variable sits at 0 of its (possibly flipped)
// coordinate, so pricing and ratio tests look like the plain simplex plus a
// bound-flip case.
class Tableau {
 public:
  Tableau(const LinearProgram& lp) : lp_(lp), m_(lp.n_rows()), n_(lp.n_vars()) {
    n_total_ = n_ + m_;  // structural + slack; artificials appended on demand
    T_.assign(m_, std::vector<double>(n_total_, 0.0));
    beta_ = lp.b;
    u_ = lp.upper;
    u_.resize(n_total_, kLpInf);
    flipped_.assign(n_total_, false);
    basic_of_col_.assign(n_total_, -1);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) T_[i][j] = lp.rows[i][j];
      T_[i][n_ + i] = 1.0;
    }
    // negate rows with negative rhs, then give them artificial basics
    for (int i = 0; i < m_; ++i) {
      if (beta_[i] < 0) {
        for (auto& v : T_[i]) v = -v;
        beta_[i] = -beta_[i];
        int a = add_artificial();
        T_[i][a] = 1.0;
        set_basis(i, a);
      } else {
        set_basis(i, n_ + i);
      }
    }
  }

  bool has_artificials() const { return n_art_ > 0; }

  // Maximizes the reduced-cost row d over eligible columns; returns false on
  // iteration trouble (status_ set).
  LpStatus run_phase(const std::vector<double>& cost, bool phase1, int& iterations) {
    d_.assign(n_total_, 0.0);
    for (int j = 0; j < n_total_; ++j) d_[j] = j < static_cast<int>(cost.size()) ? cost[j] : 0.0;
    // subtract c_B rows; account flips so nonbasic coordinates are all at 0
    for (int j = 0; j < n_total_; ++j)
      if (flipped_[j] && basic_of_col_[j] < 0) d_[j] = -d_[j];
    for (int i = 0; i < m_; ++i) {
      double cb = basis_cost(cost, i);
      if (cb == 0.0) continue;
      for (int j = 0; j < n_total_; ++j) d_[j] -= cb * T_[i][j];
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;

    int max_iter = 200 * (m_ + n_total_) + 1000;
    int stall = 0;
    double last_val = current_value(cost);
    for (int it = 0; it < max_iter; ++it) {
      ++iterations;
      bool bland = stall > 2 * m_ + 20;
      int e = pick_entering(phase1, bland);
      if (e < 0) return LpStatus::Optimal;

      double limit = u_[e];
      int leave_row = -1;
      bool leave_at_upper = false;
      for (int i = 0; i < m_; ++i) {
        double t = T_[i][e];
        double cand;
        bool at_upper;
        if (t > kEps) {
          cand = beta_[i] / t;
          at_upper = false;
        } else if (t < -kEps && u_[basis_[i]] != kLpInf) {
          cand = (u_[basis_[i]] - beta_[i]) / (-t);
          at_upper = true;
        } else {
          continue;
        }
        if (cand < limit - kEps ||
            (cand < limit + kEps && (leave_row < 0 || (bland && basis_[i] < basis_[leave_row])))) {
          limit = cand;
          leave_row = i;
          leave_at_upper = at_upper;
        }
      }

      if (limit == kLpInf) return LpStatus::Unbounded;
      if (leave_row < 0) {
        flip(e);  // entering variable runs to its own bound
      } else {
        pivot(leave_row, e);
        if (leave_at_upper) {
          // the leaving variable stopped at its upper bound, not at zero
          int left = prev_basis_;
          flip(left);
        }
      }
      double val = current_value(cost);
      stall = val > last_val + 1e-12 ? 0 : stall + 1;
      last_val = val;
    }
    return LpStatus::IterationLimit;
  }

  double current_value(const std::vector<double>& cost) const {
    double v = 0.0;
    for (int j = 0; j < n_total_; ++j) {
      double cj = j < static_cast<int>(cost.size()) ? cost[j] : 0.0;
      if (cj != 0.0) v += cj * value_of(j);
    }
    return v;
  }

  double value_of(int j) const {
    int i = basic_of_col_[j];
    double shifted = i >= 0 ? beta_[i] : 0.0;
    return flipped_[j] ? u_[j] - shifted : shifted;
  }

  // After phase 1: pivot basic artificials onto a real column when possible,
  // then freeze every artificial at zero.
  void retire_artificials() {
    for (int i = 0; i < m_; ++i) {
      int col = basis_[i];
      if (col < n_ + m_) continue;
      int e = -1;
      for (int j = 0; j < n_ + m_; ++j)
        if (basic_of_col_[j] < 0 && std::abs(T_[i][j]) > kEps) {
          e = j;
          break;
        }
      if (e >= 0) pivot(i, e);  // degenerate: beta is ~0 here
    }
    for (int j = n_ + m_; j < n_total_; ++j) u_[j] = 0.0;
  }

  int n_structural() const { return n_; }
  int n_real() const { return n_ + m_; }
  int n_cols() const { return n_total_; }

 private:
  int add_artificial() {
    for (auto& row : T_) row.push_back(0.0);
    u_.push_back(kLpInf);
    flipped_.push_back(false);
    basic_of_col_.push_back(-1);
    ++n_art_;
    return n_total_++;
  }

  void set_basis(int row, int col) {
    basis_[row] = col;
    basic_of_col_[col] = row;
  }

  double basis_cost(const std::vector<double>& cost, int row) const {
    int j = basis_[row];
    double cj = j < static_cast<int>(cost.size()) ? cost[j] : 0.0;
    return flipped_[j] ? -cj : cj;
  }

  int pick_entering(bool phase1, bool bland) const {
    int best = -1;
    double best_d = kEps;
    for (int j = 0; j < n_total_; ++j) {
      if (basic_of_col_[j] >= 0) continue;
      if (u_[j] == 0.0) continue;           // fixed (includes retired artificials)
      if (!phase1 && j >= n_ + m_) continue;  // artificials never re-enter
      if (d_[j] > (bland ? kEps : best_d)) {
        if (bland) return j;
        best_d = d_[j];
        best = j;
      }
    }
    return best;
  }

  void flip(int j) {
    double u = u_[j];
    for (int i = 0; i < m_; ++i) {
      beta_[i] -= T_[i][j] * u;
      T_[i][j] = -T_[i][j];
    }
    d_[j] = -d_[j];
    flipped_[j] = !flipped_[j];
  }

  void pivot(int row, int e) {
    prev_basis_ = basis_[row];
    double p = T_[row][e];
    double inv = 1.0 / p;
    for (auto& v : T_[row]) v *= inv;
    beta_[row] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = T_[i][e];
      if (f == 0.0) continue;
      const auto& src = T_[row];
      auto& dst = T_[i];
      for (int j = 0; j < n_total_; ++j) dst[j] -= f * src[j];
      dst[e] = 0.0;
      beta_[i] -= f * beta_[row];
    }
    double f = d_[e];
    if (f != 0.0)
      for (int j = 0; j < n_total_; ++j) d_[j] -= f * T_[row][j];
    d_[e] = 0.0;
    basic_of_col_[prev_basis_] = -1;
    set_basis(row, e);
  }

  const LinearProgram& lp_;
  int m_, n_, n_total_, n_art_ = 0;
  std::vector<std::vector<double>> T_;
  std::vector<double> beta_, u_, d_;
  std::vector<bool> flipped_;
  std::vector<int> basis_, basic_of_col_;
  int prev_basis_ = -1;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  for (double v : lp.b)
    if (!std::isfinite(v)) throw std::invalid_argument("rhs must be finite");

  LpSolution sol;
  if (lp.n_vars() == 0) {
    for (double rhs : lp.b)
      if (rhs < -kFeasTol) return sol;  // 0 <= negative rhs: infeasible
    sol.status = LpStatus::Optimal;
    return sol;
  }

  Tableau tab(lp);
  if (tab.has_artificials()) {
    std::vector<double> phase1_cost(tab.n_cols(), 0.0);
    for (int j = tab.n_real(); j < tab.n_cols(); ++j) phase1_cost[j] = -1.0;
    LpStatus st = tab.run_phase(phase1_cost, true, sol.iterations);
    if (st == LpStatus::IterationLimit) {
      sol.status = st;
      return sol;
    }
    if (tab.current_value(phase1_cost) < -kFeasTol) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    tab.retire_artificials();
  }

  std::vector<double> cost(lp.c);
  LpStatus st = tab.run_phase(cost, false, sol.iterations);
  sol.status = st;
  if (st != LpStatus::Optimal) return sol;

  sol.x.resize(lp.n_vars());
  for (int j = 0; j < lp.n_vars(); ++j) sol.x[j] = tab.value_of(j);
  sol.objective = 0.0;
  for (int j = 0; j < lp.n_vars(); ++j) sol.objective += lp.c[j] * sol.x[j];
  return sol;
}

}  // namespace evcs
