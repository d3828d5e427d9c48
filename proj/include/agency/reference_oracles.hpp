#pragma once

// Brute-force counterparts of the solvers. Apart from the domain types and
// `allocate`, nothing here calls into the production code paths: payments,
// expectations and the profile enumeration are all recomputed locally. The dense
// LP oracle reuses the simplex kernel but checks its own optimality certificate.

#include "agency/core_model.hpp"
#include "agency/lp.hpp"
#include "agency/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agency::oracle {

/// VCG payments from the externality definition: what the others would earn
/// (bid levels standing in for values) with agent k removed and everyone below
/// moving up, minus what they earn with k present. Indexed by ranking position.
inline std::vector<double> vcg_externality(const Ranking& ranking, std::span<const double> ctr) {
  const std::size_t n = ranking.size();
  const auto rate = [&](std::size_t slot) { return slot < ctr.size() ? ctr[slot] : 0.0; };
  std::vector<double> pay(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double with = 0.0, without = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      with += rate(j) * ranking[j].bid.level;
      without += rate(j < k ? j : j - 1) * ranking[j].bid.level;
    }
    pay[k] = without - with;
  }
  return pay;
}

/// GSP payments straight from the rule, indexed by ranking position.
inline std::vector<double> gsp_direct(const Ranking& ranking, std::span<const double> ctr) {
  std::vector<double> pay(ranking.size(), 0.0);
  for (std::size_t k = 0; k + 1 < ranking.size() && k < ctr.size(); ++k) pay[k] = ctr[k] * ranking[k + 1].bid.level;
  return pay;
}

struct Totals {
  std::vector<double> revenue;
  std::vector<double> payment;
};

/// Expected colluder revenues and payments, recomputed from scratch.
inline Totals expected_totals(const BidProfile& profile, const AuctionInstance& inst) {
  const std::size_t n = profile.size();
  Totals t{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& point : inst.external.support) {
    const Ranking ranking = allocate(profile, point.bids);
    const std::vector<double> pay =
        inst.mechanism == Mechanism::GSP ? gsp_direct(ranking, inst.slots) : vcg_externality(ranking, inst.slots);
    for (std::size_t k = 0; k < ranking.size(); ++k) {
      if (!ranking[k].agent.is_colluder()) continue;
      const std::size_t i = ranking[k].agent.index;
      if (k < inst.slots.size()) t.revenue[i] += point.probability * inst.slots[k] * inst.colluders[i].valuation;
      t.payment[i] += point.probability * pay[k];
    }
  }
  return t;
}

/// Every assignment of a level to each colluder combined with every permutation
/// of the ranks 1..n. Visits in lexicographic order of (levels, ranks).
template <class Visit>
void enumerate_profiles(std::span<const double> levels, std::size_t n, Visit&& visit) {
  const std::size_t d = levels.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<int> ranks(n);
  BidProfile b;
  b.bids.resize(n);
  for (;;) {
    std::iota(ranks.begin(), ranks.end(), 1);
    do {
      for (std::size_t i = 0; i < n; ++i) b.bids[i] = Bid{levels[idx[i]], ranks[i]};
      visit(static_cast<const BidProfile&>(b));
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    std::size_t pos = n;
    while (pos > 0 && ++idx[pos - 1] == d) idx[--pos] = 0;
    if (pos == 0) return;
  }
}

/// Caps apply to the d^n level assignments; rank orders multiply that by at most n!.
inline void check_cap(std::size_t d, std::size_t n, double cap, const char* who) {
  if (std::pow(static_cast<double>(d), static_cast<double>(n)) > cap)
    throw std::length_error(std::string(who) + ": enumeration exceeds the size cap");
}

struct BestProfile {
  BidProfile profile;
  double value = -std::numeric_limits<double>::infinity();
};

/// Exhaustive max of sum_i revenue[i] r_i - payment pi_i over all profiles on `levels`.
inline BestProfile brute_force_wup(std::span<const double> levels, std::span<const double> revenue_weight,
                                   double payment_weight, const AuctionInstance& inst) {
  const std::size_t n = inst.num_colluders();
  check_cap(levels.size(), n, 1e6, "brute_force_wup");
  BestProfile best;
  enumerate_profiles(levels, n, [&](const BidProfile& b) {
    const Totals t = expected_totals(b, inst);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += revenue_weight[i] * t.revenue[i] - payment_weight * t.payment[i];
    if (value > best.value) best = {b, value};
  });
  return best;
}

/// Optimal cumulative utility over all profiles on `levels`.
inline BestProfile brute_force_arbitrary(const AuctionInstance& inst, std::span<const double> levels) {
  const std::vector<double> ones(inst.num_colluders(), 1.0);
  return brute_force_wup(levels, ones, 1.0, inst);
}

/// Best single profile admitting transfers with q >= 0, delta-IC and IR:
/// r_i - t_i + delta >= 0 for every i and sum_i (r_i - t_i + delta) >= sum_i pi_i.
/// Value is -infinity when no profile qualifies.
inline BestProfile brute_force_deterministic_ll(const AuctionInstance& inst, std::span<const double> levels, double delta) {
  const std::size_t n = inst.num_colluders();
  check_cap(levels.size(), n, 1e6, "brute_force_deterministic_ll");
  BestProfile best;
  enumerate_profiles(levels, n, [&](const BidProfile& b) {
    const Totals t = expected_totals(b, inst);
    double room = 0.0, paid = 0.0, value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double headroom = t.revenue[i] - inst.colluders[i].outside_option + delta;
      if (headroom < -kTolerance) return;
      room += std::max(headroom, 0.0);
      paid += t.payment[i];
      value += t.revenue[i] - t.payment[i];
    }
    if (room < paid - kTolerance) return;
    if (value > best.value) best = {b, value};
  });
  return best;
}

struct LlValue {
  lp::Status status = lp::Status::Infeasible;
  double value = 0.0;
  std::size_t columns = 0;
  /// Largest primal or dual residual of the returned certificate.
  double residual = 0.0;
};

/// The limited-liability LP with every profile on `levels` as a column.
inline LlValue brute_force_ll(const AuctionInstance& inst, std::span<const double> levels, double p) {
  const std::size_t n = inst.num_colluders();
  check_cap(levels.size(), n, 1e5, "brute_force_ll");
  std::vector<Totals> cols;
  enumerate_profiles(levels, n, [&](const BidProfile& b) { cols.push_back(expected_totals(b, inst)); });

  lp::LinearProgram lp;
  for (std::size_t i = 0; i < n; ++i) lp.add_row(lp::Sense::GreaterEqual, inst.colluders[i].outside_option - p);
  lp.add_row(lp::Sense::GreaterEqual, 0.0);
  lp.add_row(lp::Sense::Equal, 1.0);
  std::vector<double> a(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(a.begin(), a.end(), 0.0);
    a[i] = -1.0;
    a[n] = 1.0;
    lp.add_column(0.0, a);
  }
  for (const Totals& t : cols) {
    double u = 0.0, pi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = t.revenue[i];
      u += t.revenue[i] - t.payment[i];
      pi += t.payment[i];
    }
    a[n] = -pi;
    a[n + 1] = 1.0;
    lp.add_column(u, a);
  }

  const lp::Solution s = lp::solve(lp);
  LlValue out;
  out.status = s.status;
  out.columns = cols.size();
  if (s.status != lp::Status::Optimal) return out;
  out.value = s.objective;

  // Certificate: primal rows, dual signs, reduced costs and a zero duality gap.
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_columns(); ++j) lhs += lp.coefficient(r, j) * s.primal[j];
    const double viol = lp.sense(r) == lp::Sense::Equal ? std::abs(lhs - lp.rhs(r)) : std::max(0.0, lp.rhs(r) - lhs);
    out.residual = std::max(out.residual, viol);
    if (lp.sense(r) == lp::Sense::GreaterEqual) out.residual = std::max(out.residual, s.duals[r]);
  }
  double dual_obj = 0.0;
  for (std::size_t r = 0; r < lp.num_rows(); ++r) dual_obj += lp.rhs(r) * s.duals[r];
  for (std::size_t j = 0; j < lp.num_columns(); ++j) {
    double d = lp.cost(j);
    for (std::size_t r = 0; r < lp.num_rows(); ++r) d -= s.duals[r] * lp.coefficient(r, j);
    out.residual = std::max(out.residual, d);
  }
  out.residual = std::max(out.residual, std::abs(dual_obj - s.objective));
  return out;
}

}  // namespace agency::oracle
