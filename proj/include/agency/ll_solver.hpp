#pragma once

#include "agency/arbitrary_solver.hpp"
#include "agency/core_model.hpp"
#include "agency/discretization.hpp"
#include "agency/lp.hpp"
#include "agency/mechanisms.hpp"
#include "agency/solution.hpp"
#include "agency/wup.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace agency {

/// Duals of the master: `ic[i]` for colluder i's relaxed IC row, `ir` for the IR
/// row, `normalization` for sum gamma = 1. In a maximization with >= rows the IC
/// and IR duals are nonpositive.
struct DualValues {
  std::vector<double> ic;
  double ir = 0.0;
  double normalization = 0.0;
};

struct MasterColumn {
  BidProfile profile;
  ExpectedOutcome outcome;
  double utility = 0.0;
};

/// Restricted master of the limited-liability LP over grid profiles:
///
///   max   sum_s gamma_s U(s)
///   s.t.  sum_s gamma_s r_i(s) - q_i (+ e_i) >= t_i - p     for each colluder i
///         sum_i q_i - sum_s gamma_s pi(s)     >= 0
///         sum_s gamma_s                        = 1
///         gamma, q (, e) >= 0
///
/// The elastic variables e_i only exist in phase one, whose objective is -sum e_i.
class MasterProblem {
public:
  struct Result {
    lp::Status status = lp::Status::Infeasible;
    double value = 0.0;
    std::vector<double> gamma;
    std::vector<double> transfers;
    double elastic = 0.0;
    DualValues duals;
    double dual_objective = 0.0;
  };

  MasterProblem(const AuctionInstance& inst, double p) : inst_(&inst), p_(p) {}

  /// Adds a column unless an identical profile is already present.
  bool add_column(const BidProfile& profile, bool check_duplicate = true) {
    if (check_duplicate)
      for (const auto& c : columns_)
        if (c.profile == profile) return false;
    MasterColumn col{profile, expected_outcome(profile, *inst_), 0.0};
    col.utility = col.outcome.utility();
    columns_.push_back(std::move(col));
    return true;
  }

  const std::vector<MasterColumn>& columns() const { return columns_; }
  std::size_t num_columns() const { return columns_.size(); }
  double p() const { return p_; }

  Result solve(bool phase_one = false) const {
    const std::size_t n = inst_->num_colluders();
    lp::LinearProgram lp;
    for (std::size_t i = 0; i < n; ++i) lp.add_row(lp::Sense::GreaterEqual, inst_->colluders[i].outside_option - p_);
    const std::size_t ir_row = lp.add_row(lp::Sense::GreaterEqual, 0.0);
    const std::size_t norm_row = lp.add_row(lp::Sense::Equal, 1.0);

    std::vector<double> coef(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(coef.begin(), coef.end(), 0.0);
      coef[i] = -1.0;
      coef[ir_row] = 1.0;
      lp.add_column(0.0, coef);
    }
    if (phase_one) {
      for (std::size_t i = 0; i < n; ++i) {
        std::fill(coef.begin(), coef.end(), 0.0);
        coef[i] = 1.0;
        lp.add_column(-1.0, coef);
      }
    }
    const std::size_t first_gamma = lp.num_columns();
    for (const auto& c : columns_) {
      for (std::size_t i = 0; i < n; ++i) coef[i] = c.outcome.revenue[i];
      coef[ir_row] = -c.outcome.total_payment();
      coef[norm_row] = 1.0;
      lp.add_column(phase_one ? 0.0 : c.utility, coef);
    }

    const lp::Solution s = lp::solve(lp);
    Result r;
    r.status = s.status;
    if (s.status != lp::Status::Optimal) return r;
    r.transfers.assign(s.primal.begin(), s.primal.begin() + static_cast<std::ptrdiff_t>(n));
    if (phase_one)
      for (std::size_t i = 0; i < n; ++i) r.elastic += s.primal[n + i];
    r.gamma.assign(s.primal.begin() + static_cast<std::ptrdiff_t>(first_gamma), s.primal.end());
    r.value = s.objective;
    r.duals.ic.assign(s.duals.begin(), s.duals.begin() + static_cast<std::ptrdiff_t>(n));
    r.duals.ir = s.duals[ir_row];
    r.duals.normalization = s.duals[norm_row];
    r.dual_objective = r.duals.normalization;
    for (std::size_t i = 0; i < n; ++i) r.dual_objective += (inst_->colluders[i].outside_option - p_) * r.duals.ic[i];
    return r;
  }

private:
  const AuctionInstance* inst_;
  double p_;
  std::vector<MasterColumn> columns_;
};

struct PricingResult {
  BidProfile profile;
  double reduced_cost = 0.0;
  WupWeights weights;
};

/// Most positive reduced cost over all grid profiles. Expanding
///   theta * U(s) - sum_i y_i r_i(s) + x pi(s) - z
/// with U = sum_i r_i - pi gives revenue weights theta - y_i and payment weight
/// theta - x, nonnegative whenever y, x <= 0. theta is 1 for the real objective
/// and 0 in phase one. Should a weight come out negative the WUP does not apply
/// and every grid profile is scanned instead.
inline PricingResult pricing(const DualValues& duals, const LevelGrid& grid, const AuctionInstance& inst,
                             double theta = 1.0) {
  const std::size_t n = inst.num_colluders();
  PricingResult out;
  out.weights.revenue.resize(n);
  bool negative = false;
  for (std::size_t i = 0; i < n; ++i) {
    out.weights.revenue[i] = theta - duals.ic[i];
    negative = negative || out.weights.revenue[i] < -kTolerance;
  }
  out.weights.payment = theta - duals.ir;
  negative = negative || out.weights.payment < -kTolerance;

  if (negative) {
    out.reduced_cost = -std::numeric_limits<double>::infinity();
    for_each_grid_profile(grid, n, [&](const BidProfile& b) {
      const ExpectedOutcome e = expected_outcome(b, inst);
      double value = -out.weights.payment * e.total_payment();
      for (std::size_t i = 0; i < n; ++i) value += out.weights.revenue[i] * e.revenue[i];
      if (value - duals.normalization > out.reduced_cost) {
        out.reduced_cost = value - duals.normalization;
        out.profile = b;
      }
      return true;
    });
    return out;
  }

  for (double& y : out.weights.revenue) y = std::max(0.0, y);
  out.weights.payment = std::max(0.0, out.weights.payment);
  const WupResult best = solve_wup_expected(grid, out.weights, inst);
  out.profile = best.profile;
  out.reduced_cost = best.value - duals.normalization;
  return out;
}

struct LlOptions {
  enum class Strategy { Automatic, Dense, ColumnGeneration };
  Strategy strategy = Strategy::Automatic;
  std::size_t max_rounds = 200;
  double reduced_cost_tolerance = 1e-7;
  /// Dense master when (levels * n_c)^n_c is at most this.
  double dense_column_limit = 1e5;
  std::size_t witness_search_limit = 200'000;
};

enum class LlStatus { Optimal, Infeasible, RoundLimit };

inline const char* to_string(LlStatus s) {
  switch (s) {
    case LlStatus::Optimal: return "optimal";
    case LlStatus::Infeasible: return "infeasible";
    case LlStatus::RoundLimit: return "round-limit";
  }
  return "unknown";
}

struct LlResult {
  LlStatus status = LlStatus::Infeasible;
  AgencySolution solution;
  Discretization discretization;
  WitnessSearch witness;
  double p = 0.0;
  double lp_value = 0.0;
  double dual_value = 0.0;
  std::size_t pricing_rounds = 0;
  std::size_t num_columns = 0;
  bool dense = false;
};

/// Turns a master optimum into a solution: drops columns below 1e-12, renormalizes
/// and recertifies everything through the mechanisms.
inline AgencySolution extract_solution(const MasterProblem& master, const MasterProblem::Result& r,
                                       const AuctionInstance& inst) {
  std::vector<WeightedProfile> dist;
  double total = 0.0;
  for (std::size_t s = 0; s < r.gamma.size(); ++s) {
    if (r.gamma[s] < 1e-12) continue;
    dist.push_back({master.columns()[s].profile, r.gamma[s]});
    total += r.gamma[s];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::runtime_error("extract_solution: master distribution sums to " + std::to_string(total));
  for (auto& wp : dist) wp.probability /= total;
  std::vector<double> q = r.transfers;
  for (double& x : q) x = std::max(x, 0.0);
  return certify(inst, std::move(dist), std::move(q), master.p());
}

/// Upper estimate of the grid's profile count, (levels * n_c)^n_c.
inline double full_column_count(const BidGrid& grid, std::size_t num_colluders) {
  return std::pow(static_cast<double>(grid.flattened_size()), static_cast<double>(num_colluders));
}

/// Bi-criteria scheme under limited liability. Small grids get the master with
/// every grid profile; larger ones get column generation priced by the WUP
/// solver, with an elastic phase one when no feasible starting column is known.
inline LlResult solve_ll(const AuctionInstance& inst, double epsilon, const LlOptions& opt = {}) {
  ArbitraryParams{epsilon}.validate();
  LlResult out;
  const std::size_t n = inst.num_colluders();
  out.p = ArbitraryParams{epsilon}.p(n);
  out.discretization = build_grid(inst, out.p);
  const LevelGrid& levels = out.discretization.grid.levels;

  out.dense = opt.strategy == LlOptions::Strategy::Dense ||
              (opt.strategy == LlOptions::Strategy::Automatic &&
               full_column_count(out.discretization.grid, n) <= opt.dense_column_limit);

  MasterProblem master(inst, out.p);
  MasterProblem::Result res;
  const auto finish = [&](LlStatus status) {
    out.status = status;
    out.num_columns = master.num_columns();
    if (status == LlStatus::Infeasible) return out;
    out.lp_value = res.value;
    out.dual_value = res.dual_objective;
    out.solution = extract_solution(master, res, inst);
    return out;
  };

  if (out.dense) {
    for_each_grid_profile(levels, n, [&](const BidProfile& b) {
      master.add_column(b, false);
      return true;
    });
    res = master.solve();
    if (res.status == lp::Status::Optimal) return finish(LlStatus::Optimal);
    out.witness = find_witness_profile(inst, out.discretization, opt.witness_search_limit);
    return finish(LlStatus::Infeasible);
  }

  BidProfile zero;
  for (std::size_t i = 0; i < n; ++i) zero.bids.push_back({levels[levels.size() - 1], static_cast<int>(n - i)});
  master.add_column(zero);
  out.witness = find_witness_profile(inst, out.discretization, opt.witness_search_limit);
  if (out.witness.witness) master.add_column(*out.witness.witness);

  // Phase one: drive the elastic slack of the IC rows to zero.
  for (;;) {
    res = master.solve(true);
    if (res.status != lp::Status::Optimal) throw std::runtime_error("solve_ll: phase-one master not optimal");
    if (res.elastic <= kTolerance) break;
    if (out.pricing_rounds >= opt.max_rounds) return finish(LlStatus::Infeasible);
    const PricingResult pr = pricing(res.duals, levels, inst, 0.0);
    ++out.pricing_rounds;
    if (pr.reduced_cost <= opt.reduced_cost_tolerance || !master.add_column(pr.profile)) return finish(LlStatus::Infeasible);
  }

  for (;;) {
    res = master.solve();
    if (res.status != lp::Status::Optimal) throw std::runtime_error("solve_ll: master not optimal");
    if (out.pricing_rounds >= opt.max_rounds) return finish(LlStatus::RoundLimit);
    const PricingResult pr = pricing(res.duals, levels, inst);
    ++out.pricing_rounds;
    if (pr.reduced_cost <= opt.reduced_cost_tolerance) return finish(LlStatus::Optimal);
    // A repeated column with positive reduced cost means the duals are numerically off.
    if (!master.add_column(pr.profile)) return finish(LlStatus::Optimal);
  }
}

}  // namespace agency
