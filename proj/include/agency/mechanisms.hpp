#pragma once

#include "agency/core_model.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace agency {

struct AgentRef {
  enum class Kind { Colluder, External };
  Kind kind = Kind::Colluder;
  std::size_t index = 0;

  bool is_colluder() const { return kind == Kind::Colluder; }
  friend bool operator==(const AgentRef&, const AgentRef&) = default;
};

struct RankedBid {
  AgentRef agent;
  Bid bid;
};

/// All bids in auction order, highest first. Position k (0-based) gets slot k when
/// k < m.
using Ranking = std::vector<RankedBid>;

/// Merges colluder and external bids into auction order. External bids carry rank
/// 0. Identical bids keep input order (colluders by index, then externals by index).
inline Ranking allocate(const BidProfile& colluders, std::span<const double> external) {
  Ranking ranking;
  ranking.reserve(colluders.size() + external.size());
  for (std::size_t i = 0; i < colluders.size(); ++i) ranking.push_back({{AgentRef::Kind::Colluder, i}, colluders[i]});
  for (std::size_t h = 0; h < external.size(); ++h) ranking.push_back({{AgentRef::Kind::External, h}, Bid{external[h], 0}});
  std::stable_sort(ranking.begin(), ranking.end(), [](const RankedBid& a, const RankedBid& b) { return a.bid > b.bid; });
  return ranking;
}

namespace detail {

inline double ctr_at(std::span<const double> ctr, std::size_t slot) { return slot < ctr.size() ? ctr[slot] : 0.0; }

inline double level_at(const Ranking& ranking, std::size_t position) {
  return position < ranking.size() ? ranking[position].bid.level : 0.0;
}

}  // namespace detail

/// GSP: the bidder in slot k pays ctr_k times the level of the next bid.
/// Returned per ranking position.
inline std::vector<double> payments_gsp(const Ranking& ranking, std::span<const double> ctr) {
  std::vector<double> pay(ranking.size(), 0.0);
  for (std::size_t k = 0; k < ranking.size() && k < ctr.size(); ++k) pay[k] = ctr[k] * detail::level_at(ranking, k + 1);
  return pay;
}

/// VCG closed form: slot k pays sum_{j>k} level_j * (ctr_{j-1} - ctr_j), with
/// ctr = 0 past the last slot. Returned per ranking position.
inline std::vector<double> payments_vcg(const Ranking& ranking, std::span<const double> ctr) {
  const std::size_t m = ctr.size();
  std::vector<double> pay(ranking.size(), 0.0);
  for (std::size_t k = 0; k < ranking.size() && k < m; ++k) {
    double total = 0.0;
    for (std::size_t j = k + 1; j <= m; ++j)
      total += detail::level_at(ranking, j) * (detail::ctr_at(ctr, j - 1) - detail::ctr_at(ctr, j));
    pay[k] = total;
  }
  return pay;
}

inline std::vector<double> payments(const Ranking& ranking, std::span<const double> ctr, Mechanism mechanism) {
  return mechanism == Mechanism::GSP ? payments_gsp(ranking, ctr) : payments_vcg(ranking, ctr);
}

/// Auction result against one fixed external profile.
struct Outcome {
  static constexpr std::size_t kUnallocated = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> colluder_slot;
  std::vector<double> colluder_revenue;
  std::vector<double> colluder_payment;
  std::vector<double> external_payment;
};

inline Outcome evaluate(const BidProfile& profile, std::span<const double> external, const AuctionInstance& inst) {
  const Ranking ranking = allocate(profile, external);
  const std::vector<double> pay = payments(ranking, inst.slots, inst.mechanism);

  Outcome out;
  out.colluder_slot.assign(profile.size(), Outcome::kUnallocated);
  out.colluder_revenue.assign(profile.size(), 0.0);
  out.colluder_payment.assign(profile.size(), 0.0);
  out.external_payment.assign(external.size(), 0.0);
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const AgentRef& who = ranking[k].agent;
    if (!who.is_colluder()) {
      out.external_payment[who.index] = pay[k];
      continue;
    }
    out.colluder_payment[who.index] = pay[k];
    if (k < inst.num_slots()) {
      out.colluder_slot[who.index] = k;
      out.colluder_revenue[who.index] = inst.slots[k] * inst.colluders[who.index].valuation;
    }
  }
  return out;
}

/// Revenues and payments of each colluder in expectation over the external
/// distribution (exact enumeration of the support, in support order).
struct ExpectedOutcome {
  std::vector<double> revenue;
  std::vector<double> payment;

  double total_revenue() const { return std::accumulate(revenue.begin(), revenue.end(), 0.0); }
  double total_payment() const { return std::accumulate(payment.begin(), payment.end(), 0.0); }
  /// Cumulative expected utility: sum over colluders of revenue minus payment.
  double utility() const {
    double u = 0.0;
    for (std::size_t i = 0; i < revenue.size(); ++i) u += revenue[i] - payment[i];
    return u;
  }
};

inline ExpectedOutcome expected_outcome(const BidProfile& profile, const AuctionInstance& inst) {
  ExpectedOutcome e{std::vector<double>(profile.size(), 0.0), std::vector<double>(profile.size(), 0.0)};
  for (const auto& point : inst.external.support) {
    const Outcome o = evaluate(profile, point.bids, inst);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      e.revenue[i] += point.probability * o.colluder_revenue[i];
      e.payment[i] += point.probability * o.colluder_payment[i];
    }
  }
  return e;
}

/// Every colluder bids its valuation. Equal valuations are ordered by index.
inline BidProfile truthful_profile(const AuctionInstance& inst) {
  const std::size_t n = inst.num_colluders();
  BidProfile profile;
  for (std::size_t i = 0; i < n; ++i) profile.bids.push_back({inst.colluders[i].valuation, static_cast<int>(n - i)});
  return profile;
}

/// Expected utility of each colluder when everyone bids truthfully without the
/// agency. Under VCG this is the natural outside option; under GSP it is a
/// simplification (truthful bidding is not an equilibrium there).
inline std::vector<double> individual_baseline(const AuctionInstance& inst) {
  const ExpectedOutcome e = expected_outcome(truthful_profile(inst), inst);
  std::vector<double> u(inst.num_colluders());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = e.revenue[i] - e.payment[i];
  return u;
}

}  // namespace agency
