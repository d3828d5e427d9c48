#pragma once

#include "agency/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace agency {

/// Half-open interval (lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  bool contains(double x) const { return x > lower && x <= upper; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Probability that some external bid of the realized profile lands in `iv`.
inline double event_probability(const ExternalDistribution& dist, const Interval& iv) {
  double p = 0.0;
  for (const auto& point : dist.support)
    if (std::any_of(point.bids.begin(), point.bids.end(), [&](double b) { return iv.contains(b); })) p += point.probability;
  return p;
}

/// Recursive bisection: an interval is kept once its event probability is at most
/// `p` or its width is at most `eta`; otherwise both halves recurse. Output is
/// sorted by lower endpoint. `calls`, when given, is incremented once per call.
inline std::vector<Interval> rec_split(const Interval& iv, double p, double eta, const ExternalDistribution& dist,
                                       std::size_t* calls = nullptr) {
  if (calls) ++*calls;
  if (event_probability(dist, iv) <= p || iv.width() <= eta) return {iv};
  const double mid = (iv.lower + iv.upper) / 2.0;
  std::vector<Interval> out = rec_split({iv.lower, mid}, p, eta, dist, calls);
  std::vector<Interval> right = rec_split({mid, iv.upper}, p, eta, dist, calls);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

struct BitCount {
  int bits = 0;
  bool capped = false;  // some bid is not a dyadic rational with <= 53 fractional bits
};

inline constexpr int kMaxBits = 53;

/// Largest number of fractional binary digits among the support bids.
inline BitCount max_bits(const ExternalDistribution& dist) {
  BitCount out;
  for (const auto& point : dist.support) {
    for (double b : point.bids) {
      int k = 0;
      while (k <= kMaxBits && std::ldexp(b, k) != std::floor(std::ldexp(b, k))) ++k;
      if (k > kMaxBits) {
        out.capped = true;
        k = kMaxBits;
      }
      out.bits = std::max(out.bits, k);
    }
  }
  return out;
}

struct IntervalSet {
  std::vector<Interval> intervals;
  double p = 1.0;
  double eta = 1.0;

  std::size_t size() const { return intervals.size(); }
};

/// Discretized colluder bids: every interval's lower endpoint, each available
/// with tie ranks 1..ranks.
struct BidGrid {
  LevelGrid levels;
  std::size_t ranks = 1;

  std::size_t flattened_size() const { return levels.size() * ranks; }
};

struct Discretization {
  IntervalSet intervals;
  BidGrid grid;
  BitCount bits;
  std::size_t recursion_calls = 0;
  std::size_t num_external = 0;

  double eta() const { return intervals.eta; }
  /// The a-priori bound (2 n_e / p) log2(1/eta) on the number of intervals.
  double interval_bound() const {
    return 2.0 * static_cast<double>(num_external) / intervals.p * std::log2(1.0 / intervals.eta);
  }
};

/// eta = 2^-M with M the bit length of the external bids, intervals from
/// bisecting (0, 1], grid from their lower endpoints.
inline Discretization build_grid(const AuctionInstance& inst, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("build_grid: p must lie in (0, 1]");
  Discretization out;
  out.bits = max_bits(inst.external);
  out.num_external = inst.external.num_agents();
  out.intervals.p = p;
  out.intervals.eta = std::ldexp(1.0, -out.bits.bits);
  out.intervals.intervals = rec_split({0.0, 1.0}, p, out.intervals.eta, inst.external, &out.recursion_calls);
  std::vector<double> lowers;
  for (const auto& iv : out.intervals.intervals) lowers.push_back(iv.lower);
  out.grid.levels = LevelGrid(std::move(lowers));
  out.grid.ranks = inst.num_colluders();
  return out;
}

/// Rounds every bid down to the largest grid level not above it and re-ranks the
/// colluders so their relative order is unchanged.
inline BidProfile project_profile(const BidGrid& grid, const BidProfile& profile) {
  const std::size_t n = profile.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return profile[a] > profile[b]; });
  BidProfile out;
  out.bids.resize(n);
  const auto levels = grid.levels.levels();  // descending
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    auto it = std::find_if(levels.begin(), levels.end(), [&](double l) { return l <= profile[i].level; });
    const double level = it == levels.end() ? levels.back() : *it;
    out[i] = Bid{level, static_cast<int>(n - k)};
  }
  return out;
}

/// Visits every colluder profile over `levels`: each of the d^n level assignments,
/// and for colluders sharing a level every relative order among them. Ranks are
/// n..1 down the resulting order. Stops early when `visit` returns false; returns
/// the number of profiles visited.
template <class Visit>
std::size_t for_each_grid_profile(const LevelGrid& levels, std::size_t n, Visit&& visit) {
  const std::size_t d = levels.size();
  std::vector<std::size_t> assign(n, 0);
  std::vector<std::size_t> order(n);
  BidProfile profile;
  profile.bids.resize(n);
  std::size_t visited = 0;
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return assign[a] < assign[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t k = 0; k < n;) {
      std::size_t e = k;
      while (e < n && assign[order[e]] == assign[order[k]]) ++e;
      groups.emplace_back(k, e);
      k = e;
    }
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) profile[order[k]] = Bid{levels[assign[order[k]]], static_cast<int>(n - k)};
      ++visited;
      if (!visit(static_cast<const BidProfile&>(profile))) return visited;
      bool advanced = false;
      for (std::size_t g = groups.size(); g-- > 0;) {
        if (std::next_permutation(order.begin() + groups[g].first, order.begin() + groups[g].second)) {
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    std::size_t pos = 0;
    while (pos < n && ++assign[pos] == d) assign[pos++] = 0;
    if (pos == n) return visited;
  }
}

}  // namespace agency
