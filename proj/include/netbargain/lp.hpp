#pragma once

// Dense two-phase simplex over exact rationals with Bland's rule.
//
//   maximize c.x  subject to  rows (<=, =, >=),  x >= 0.
//
// Small problems only (a few hundred columns); every pivot is exact so the
// result is a certified vertex of the feasible region.

#include "netbargain/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace netbargain::lp {

enum class Sense { less_equal, equal, greater_equal };

struct Row {
  std::vector<Rational> coefficients;
  Sense sense = Sense::less_equal;
  Rational rhs = 0;
};

struct Problem {
  std::size_t variables = 0;
  std::vector<Rational> objective;  // maximized; empty means feasibility only
  std::vector<Row> rows;

  Row& add_row(Sense sense, Rational rhs) {
    rows.push_back(Row{std::vector<Rational>(variables, Rational(0)), sense, std::move(rhs)});
    return rows.back();
  }
};

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Rational objective = 0;
  std::vector<Rational> x;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows, std::vector<Rational>(cols + 1, Rational(0))),
        basis_(rows, 0) {}

  Rational& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  Rational& rhs(std::size_t r) { return a_[r][cols_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || a_[i][c] == 0) continue;
      const Rational f = a_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (a_[r][j] != 0) a_[i][j] -= f * a_[r][j];
      }
    }
    basis_[r] = c;
  }

  // Maximizes cost over the current basis; columns with allowed[c] == false
  // never enter. Returns false when unbounded.
  bool optimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    while (true) {
      // Reduced costs: cost_j - sum_i cost_{basis_i} a_ij.
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < cols_ && !entering; ++j) {
        if (!allowed[j]) continue;
        Rational reduced = cost[j];
        for (std::size_t i = 0; i < rows_; ++i) {
          if (a_[i][j] != 0) reduced -= cost[basis_[i]] * a_[i][j];
        }
        if (reduced > 0) entering = j;
      }
      if (!entering) return true;
      const std::size_t c = *entering;
      std::optional<std::size_t> leaving;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (a_[i][c] <= 0) continue;
        Rational ratio = a_[i][cols_] / a_[i][c];
        if (!leaving || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[*leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, c);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline Result solve(const Problem& problem) {
  const std::size_t n = problem.variables;
  const std::size_t m = problem.rows.size();

  // Normalize to nonnegative right-hand sides.
  std::vector<Row> rows = problem.rows;
  for (auto& row : rows) {
    if (row.coefficients.size() != n) throw std::invalid_argument("row width mismatch");
    if (row.rhs < 0) {
      for (auto& a : row.coefficients) a = -a;
      row.rhs = -row.rhs;
      if (row.sense == Sense::less_equal) {
        row.sense = Sense::greater_equal;
      } else if (row.sense == Sense::greater_equal) {
        row.sense = Sense::less_equal;
      }
    }
  }

  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::equal) ++slack_count;
    if (row.sense != Sense::less_equal) ++artificial_count;
  }
  const std::size_t first_slack = n;
  const std::size_t first_artificial = n + slack_count;
  const std::size_t cols = n + slack_count + artificial_count;

  detail::Tableau t(m, cols);
  std::size_t next_slack = first_slack;
  std::size_t next_artificial = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = rows[i];
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = row.coefficients[j];
    t.rhs(i) = row.rhs;
    switch (row.sense) {
      case Sense::less_equal:
        t.at(i, next_slack) = 1;
        t.basis(i) = next_slack++;
        break;
      case Sense::greater_equal:
        t.at(i, next_slack++) = -1;
        t.at(i, next_artificial) = 1;
        t.basis(i) = next_artificial++;
        break;
      case Sense::equal:
        t.at(i, next_artificial) = 1;
        t.basis(i) = next_artificial++;
        break;
    }
  }

  std::vector<bool> allowed(cols, true);
  if (artificial_count > 0) {
    std::vector<Rational> phase1(cols, Rational(0));
    for (std::size_t j = first_artificial; j < cols; ++j) phase1[j] = -1;
    t.optimize(phase1, allowed);
    Rational infeasibility = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis(i) >= first_artificial) infeasibility += t.rhs(i);
    }
    if (infeasibility != 0) return Result{Status::infeasible, 0, {}};
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis(i) < first_artificial) continue;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (t.at(i, j) != 0) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  }

  std::vector<Rational> cost(cols, Rational(0));
  for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j) {
    cost[j] = problem.objective[j];
  }
  if (!t.optimize(cost, allowed)) return Result{Status::unbounded, 0, {}};

  Result result;
  result.status = Status::optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis(i) < n) result.x[t.basis(i)] = t.rhs(i);
  }
  for (std::size_t j = 0; j < n && j < problem.objective.size(); ++j) {
    result.objective += problem.objective[j] * result.x[j];
  }
  return result;
}

}  // namespace netbargain::lp
