#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace agency::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

/// maximize c^T x  s.t.  A x (<=|>=|=) b,  x >= 0.
/// Rows are declared first; columns are appended with their dense coefficients.
class LinearProgram {
public:
  std::size_t add_row(Sense sense, double rhs) {
    if (!columns_.empty()) throw std::logic_error("LinearProgram: declare rows before columns");
    senses_.push_back(sense);
    rhs_.push_back(rhs);
    return senses_.size() - 1;
  }

  std::size_t add_column(double cost, std::span<const double> coefficients) {
    if (coefficients.size() != num_rows()) throw std::invalid_argument("LinearProgram: column size mismatch");
    costs_.push_back(cost);
    columns_.insert(columns_.end(), coefficients.begin(), coefficients.end());
    return costs_.size() - 1;
  }

  std::size_t num_rows() const { return senses_.size(); }
  std::size_t num_columns() const { return costs_.size(); }
  Sense sense(std::size_t r) const { return senses_[r]; }
  double rhs(std::size_t r) const { return rhs_[r]; }
  double cost(std::size_t j) const { return costs_[j]; }
  double coefficient(std::size_t r, std::size_t j) const { return columns_[j * num_rows() + r]; }

private:
  std::vector<Sense> senses_;
  std::vector<double> rhs_;
  std::vector<double> costs_;
  std::vector<double> columns_;  // column-major
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;
  /// Row duals with the usual sign pattern for a maximization:
  /// <= rows nonnegative, >= rows nonpositive, = rows free.
  std::vector<double> duals;
  /// c_j - y^T A_j, recomputed from the original data; <= 0 at optimality.
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;
};

struct Options {
  double pivot_tolerance = 1e-9;
  double optimality_tolerance = 1e-10;
  double feasibility_tolerance = 1e-9;
  /// Dantzig pricing switches to Bland's rule after this many consecutive
  /// degenerate pivots; Bland's rule cannot cycle.
  std::size_t degenerate_streak = 50;
  std::size_t max_iterations = 200000;
};

namespace detail {

/// Dense two-phase tableau. Columns: structural, then one slack/surplus per
/// inequality row, then one artificial per row. Artificial columns never enter
/// in phase 2 and serve to read the row duals at the end.
class Tableau {
public:
  Tableau(const LinearProgram& lp, const Options& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_struct_ = lp.num_columns();
    sign_.assign(m_, 1.0);
    slack_col_.assign(m_, npos);
    std::size_t slacks = 0;
    for (std::size_t r = 0; r < m_; ++r)
      if (lp.sense(r) != Sense::Equal) slack_col_[r] = n_struct_ + slacks++;
    art_begin_ = n_struct_ + slacks;
    width_ = art_begin_ + m_ + 1;  // last column is the right-hand side
    t_.assign((m_ + 1) * width_, 0.0);
    basis_.assign(m_, npos);
    can_enter_.assign(width_ - 1, true);
    basic_.assign(width_ - 1, false);

    for (std::size_t r = 0; r < m_; ++r) {
      Sense sense = lp.sense(r);
      if (lp.rhs(r) < 0.0) {
        sign_[r] = -1.0;
        if (sense == Sense::LessEqual)
          sense = Sense::GreaterEqual;
        else if (sense == Sense::GreaterEqual)
          sense = Sense::LessEqual;
      }
      for (std::size_t j = 0; j < n_struct_; ++j) at(r, j) = sign_[r] * lp.coefficient(r, j);
      at(r, rhs_col()) = sign_[r] * lp.rhs(r);
      at(r, art_begin_ + r) = 1.0;
      if (sense == Sense::LessEqual) {
        at(r, slack_col_[r]) = 1.0;
        basis_[r] = slack_col_[r];
      } else {
        if (sense == Sense::GreaterEqual) at(r, slack_col_[r]) = -1.0;
        basis_[r] = art_begin_ + r;
      }
      basic_[basis_[r]] = true;
    }
  }

  Solution run() {
    Solution sol;
    // Phase 1: maximize minus the sum of basic artificials.
    for (std::size_t r = 0; r < m_; ++r) can_enter_[art_begin_ + r] = false;
    std::vector<double> phase1(width_ - 1, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] == art_begin_ + r) phase1[art_begin_ + r] = -1.0;
    set_objective(phase1);
    Status st = iterate(sol.iterations);
    if (st == Status::IterationLimit) return finish(sol, st);
    if (-objective_value() > opt_.feasibility_tolerance) return finish(sol, Status::Infeasible);
    drive_out_artificials();

    std::vector<double> phase2(width_ - 1, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) phase2[j] = lp_.cost(j);
    set_objective(phase2);
    st = iterate(sol.iterations);
    return finish(sol, st);
  }

private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
  std::size_t rhs_col() const { return width_ - 1; }
  std::size_t obj_row() const { return m_; }

  // Objective row holds reduced costs d_j = c_j - c_B B^-1 A_j and, in the rhs
  // column, minus the current objective value.
  void set_objective(const std::vector<double>& cost) {
    cost_ = cost;
    for (std::size_t c = 0; c + 1 < width_; ++c) at(obj_row(), c) = cost[c];
    at(obj_row(), rhs_col()) = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(obj_row(), c) -= cb * at(r, c);
    }
  }

  double objective_value() const { return -at(obj_row(), rhs_col()); }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t c = 0; c < width_; ++c) at(row, c) /= p;
    at(row, col) = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(row, c);
      at(r, col) = 0.0;
    }
    basic_[basis_[row]] = false;
    basic_[col] = true;
    basis_[row] = col;
  }

  Status iterate(std::size_t& iterations) {
    bool bland = false;
    std::size_t streak = 0;
    for (;;) {
      if (iterations >= opt_.max_iterations) return Status::IterationLimit;
      std::size_t enter = npos;
      double best = opt_.optimality_tolerance;
      for (std::size_t c = 0; c + 1 < width_; ++c) {
        if (!can_enter_[c] || is_basic(c)) continue;
        const double d = at(obj_row(), c);
        if (d > best) {
          enter = c;
          if (bland) break;
          best = d;
        }
      }
      if (enter == npos) return Status::Optimal;

      std::size_t leave = npos;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= opt_.pivot_tolerance) continue;
        const double q = std::max(at(r, rhs_col()), 0.0) / a;
        if (q < ratio || (q == ratio && leave != npos && basis_[r] < basis_[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == npos) return Status::Unbounded;

      streak = ratio == 0.0 ? streak + 1 : 0;
      if (streak > opt_.degenerate_streak) bland = true;
      pivot(leave, enter);
      ++iterations;
    }
  }

  bool is_basic(std::size_t c) const { return basic_[c]; }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < art_begin_) continue;
      std::size_t col = npos;
      double best = opt_.pivot_tolerance;
      for (std::size_t c = 0; c < art_begin_; ++c) {
        if (is_basic(c)) continue;
        if (std::abs(at(r, c)) > best) {
          best = std::abs(at(r, c));
          col = c;
        }
      }
      // A row with nothing to pivot on is redundant; its artificial stays at zero.
      if (col != npos) pivot(r, col);
    }
  }

  Solution finish(Solution& sol, Status st) {
    sol.status = st;
    sol.primal.assign(n_struct_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_struct_) sol.primal[basis_[r]] = std::max(at(r, rhs_col()), 0.0);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_struct_; ++j) sol.objective += lp_.cost(j) * sol.primal[j];

    // Artificial a_r has phase-2 cost 0 and column e_r, so its reduced cost is -y_r
    // for the sign-normalized row.
    sol.duals.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) sol.duals[r] = -sign_[r] * at(obj_row(), art_begin_ + r);
    sol.reduced_costs.assign(n_struct_, 0.0);
    for (std::size_t j = 0; j < n_struct_; ++j) {
      double d = lp_.cost(j);
      for (std::size_t r = 0; r < m_; ++r) d -= sol.duals[r] * lp_.coefficient(r, j);
      sol.reduced_costs[j] = d;
    }
    return sol;
  }

  const LinearProgram& lp_;
  Options opt_;
  std::size_t m_ = 0, n_struct_ = 0, art_begin_ = 0, width_ = 0;
  std::vector<double> sign_;
  std::vector<std::size_t> slack_col_;
  std::vector<double> t_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
  std::vector<bool> can_enter_;
  std::vector<bool> basic_;
};

}  // namespace detail

/// Dense two-phase primal simplex. Desk scale only: a handful of rows and up to
/// ~10^5 columns.
inline Solution solve(const LinearProgram& lp, const Options& options = {}) {
  return detail::Tableau(lp, options).run();
}

}  // namespace agency::lp
