#pragma once

#include "agency/core_model.hpp"
#include "agency/mechanisms.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace agency {

struct WeightedProfile {
  BidProfile profile;
  double probability = 0.0;
};

struct ConstraintSlacks {
  std::vector<double> ic;  // E[r_i] - q_i - (t_i - delta), per colluder
  double ir = 0.0;         // sum q_i - E[sum pi_i]
  std::vector<double> ll;  // q_i, per colluder
};

/// A randomized bidding strategy plus transfers. Transfers follow the sign
/// convention q_i > 0 meaning colluder i pays the agency. Every number besides the
/// distribution and transfers is derived by `certify`.
struct AgencySolution {
  std::vector<WeightedProfile> distribution;
  std::vector<double> transfers;
  std::vector<double> expected_revenue;
  std::vector<double> expected_payment;
  double objective = 0.0;
  ConstraintSlacks slacks;
  double relaxation = 0.0;

  bool ic_feasible(double tol = kTolerance) const {
    for (double s : slacks.ic)
      if (s < -tol) return false;
    return true;
  }
  bool ir_feasible(double tol = kTolerance) const { return slacks.ir >= -tol; }
  bool ll_feasible(double tol = kTolerance) const {
    for (double q : slacks.ll)
      if (q < -tol) return false;
    return true;
  }
};

/// Recomputes expected revenues, payments, objective and every slack from scratch.
inline AgencySolution certify(const AuctionInstance& inst, std::vector<WeightedProfile> distribution,
                              std::vector<double> transfers, double relaxation) {
  const std::size_t n = inst.num_colluders();
  AgencySolution sol;
  sol.distribution = std::move(distribution);
  sol.transfers = std::move(transfers);
  sol.relaxation = relaxation;
  sol.expected_revenue.assign(n, 0.0);
  sol.expected_payment.assign(n, 0.0);
  for (const auto& wp : sol.distribution) {
    const ExpectedOutcome e = expected_outcome(wp.profile, inst);
    for (std::size_t i = 0; i < n; ++i) {
      sol.expected_revenue[i] += wp.probability * e.revenue[i];
      sol.expected_payment[i] += wp.probability * e.payment[i];
    }
    sol.objective += wp.probability * e.utility();
  }
  double total_transfer = 0.0;
  double total_payment = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.slacks.ic.push_back(sol.expected_revenue[i] - sol.transfers[i] - (inst.colluders[i].outside_option - relaxation));
    sol.slacks.ll.push_back(sol.transfers[i]);
    total_transfer += sol.transfers[i];
    total_payment += sol.expected_payment[i];
  }
  sol.slacks.ir = total_transfer - total_payment;
  return sol;
}

/// Per-colluder delta-IC test: E[r_i] - q_i >= t_i - delta, up to 1e-9.
inline std::vector<bool> check_delta_ic(const AgencySolution& sol, const AuctionInstance& inst, double delta) {
  std::vector<double> revenue(inst.num_colluders(), 0.0);
  for (const auto& wp : sol.distribution) {
    const ExpectedOutcome e = expected_outcome(wp.profile, inst);
    for (std::size_t i = 0; i < revenue.size(); ++i) revenue[i] += wp.probability * e.revenue[i];
  }
  std::vector<bool> ok(revenue.size());
  for (std::size_t i = 0; i < revenue.size(); ++i)
    ok[i] = revenue[i] - sol.transfers[i] >= inst.colluders[i].outside_option - delta - kTolerance;
  return ok;
}

}  // namespace agency
