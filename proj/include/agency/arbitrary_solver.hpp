#pragma once

#include "agency/core_model.hpp"
#include "agency/discretization.hpp"
#include "agency/mechanisms.hpp"
#include "agency/solution.hpp"
#include "agency/wup.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace agency {

struct ArbitraryParams {
  double epsilon = 0.05;

  /// Probability threshold for the grid; the value loss n_c * p and the IC
  /// relaxation p are then both at most epsilon.
  double p(std::size_t num_colluders) const { return epsilon / static_cast<double>(num_colluders); }

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  }
};

struct WitnessSearch {
  bool witness_found = false;
  bool exhaustive = false;  // the whole grid was searched
  std::optional<BidProfile> witness;
  std::size_t profiles_checked = 0;
};

/// Looks for a grid profile giving every colluder r_i - pi_i >= t_i - p. Stops at
/// the first witness or after `max_profiles` candidates.
inline WitnessSearch find_witness_profile(const AuctionInstance& inst, const Discretization& disc,
                                           std::size_t max_profiles = 1'000'000) {
  WitnessSearch report;
  const double p = disc.intervals.p;
  bool truncated = false;
  for_each_grid_profile(disc.grid.levels, inst.num_colluders(), [&](const BidProfile& b) {
    ++report.profiles_checked;
    const ExpectedOutcome e = expected_outcome(b, inst);
    bool ok = true;
    for (std::size_t i = 0; i < inst.num_colluders() && ok; ++i)
      ok = e.revenue[i] - e.payment[i] >= inst.colluders[i].outside_option - p - kTolerance;
    if (ok) {
      report.witness_found = true;
      report.witness = b;
      return false;
    }
    if (report.profiles_checked >= max_profiles) {
      truncated = true;
      return false;
    }
    return true;
  });
  report.exhaustive = !report.witness_found && !truncated;
  return report;
}

struct ArbitraryResult {
  AgencySolution solution;
  Discretization discretization;
  WupResult wup;
  double p = 0.0;
  /// The total IR slack is negative: no grid profile can cover the outside options.
  bool outside_options_unattainable = false;
};

/// Bi-criteria scheme for arbitrary transfers: the best grid profile for the plain
/// cumulative utility, played deterministically, with q_i = r_i - t_i + p.
/// The result is p-IC with zero slack; IR holds whenever outside options are
/// attainable.
inline ArbitraryResult solve_arbitrary(const AuctionInstance& inst, double epsilon) {
  const ArbitraryParams params{epsilon};
  params.validate();
  ArbitraryResult out;
  out.p = params.p(inst.num_colluders());
  out.discretization = build_grid(inst, out.p);
  out.wup = solve_wup_expected(out.discretization.grid.levels, WupWeights::unit(inst.num_colluders()), inst);

  const ExpectedOutcome e = expected_outcome(out.wup.profile, inst);
  std::vector<double> transfers(inst.num_colluders());
  for (std::size_t i = 0; i < transfers.size(); ++i)
    transfers[i] = e.revenue[i] - inst.colluders[i].outside_option + out.p;
  out.solution = certify(inst, {{out.wup.profile, 1.0}}, std::move(transfers), out.p);
  out.outside_options_unattainable = !out.solution.ir_feasible();
  return out;
}

}  // namespace agency
