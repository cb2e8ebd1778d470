#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace evcs {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

// Maximize c'x subject to rows(x) <= b and 0 <= x <= upper (upper entries may
// be infinite). Rows are stored dense; the problems built here are small.
struct LinearProgram {
  std::vector<double> c;
  std::vector<double> upper;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<double> b;

  int n_vars() const { return static_cast<int>(c.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }

  int add_var(std::string name, double obj, double ub = kLpInf);
  void add_row(const std::vector<std::pair<int, double>>& terms, double rhs);
  void dump(std::ostream& out) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

// Dense two-phase simplex with upper-bounded variables. Tolerances: 1e-9 on
// reduced costs and pivots, 1e-7 on phase-1 feasibility.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace evcs
