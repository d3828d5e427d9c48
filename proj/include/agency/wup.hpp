#pragma once

#include "agency/core_model.hpp"
#include "agency/mechanisms.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace agency {

/// Objective coefficients of the weighted utility problem:
/// maximize sum_i revenue[i] * r_i - payment * pi_i.
struct WupWeights {
  std::vector<double> revenue;
  double payment = 1.0;

  static WupWeights unit(std::size_t n) { return {std::vector<double>(n, 1.0), 1.0}; }

  void validate(std::size_t n) const {
    if (revenue.size() != n) throw std::invalid_argument("WupWeights: one revenue weight per colluder required");
    for (double y : revenue)
      if (!(y >= 0.0)) throw std::invalid_argument("WupWeights: revenue weights must be nonnegative");
    if (!(payment >= 0.0)) throw std::invalid_argument("WupWeights: payment weight must be nonnegative");
  }
};

/// Contribution of the colluder at sorted `position` (0-based) under GSP, given its
/// own level and the level of the next colluder (nullopt on the arc into the sink).
/// It equals the colluder's weighted utility in slot position + #(externals above).
inline double arc_weight_gsp(std::size_t position, std::size_t colluder, double own_level,
                             std::optional<double> next_level, std::span<const double> external,
                             const WupWeights& w, const AuctionInstance& inst) {
  std::size_t above = 0;
  double price = next_level.value_or(0.0);
  for (double e : external) {
    if (e > own_level)
      ++above;
    else
      price = std::max(price, e);
  }
  const double ctr = inst.ctr(position + above);
  return ctr * (w.revenue[colluder] * inst.colluders[colluder].valuation - w.payment * price);
}

/// VCG counterpart. The total VCG bill of the colluders is split so that each arc
/// only needs its two endpoints: the colluder's own bid charged to the position
/// colluders above it, plus every external bid between this colluder and the next,
/// charged to all position + 1 colluders above that external.
inline double arc_weight_vcg(std::size_t position, std::size_t colluder, double own_level,
                             std::optional<double> next_level, std::span<const double> external,
                             const WupWeights& w, const AuctionInstance& inst) {
  std::size_t above = 0;
  for (double e : external)
    if (e > own_level) ++above;
  const std::size_t slot = position + above;
  const double revenue = inst.ctr(slot) * inst.colluders[colluder].valuation;

  double own_share = 0.0;
  if (position > 0) own_share = static_cast<double>(position) * own_level * (inst.ctr(slot - 1) - inst.ctr(slot));

  double between = 0.0;
  for (std::size_t h = 0; h < external.size(); ++h) {
    const double e = external[h];
    if (e > own_level) continue;
    if (next_level && e <= *next_level) continue;  // ties go to the colluder below
    between += static_cast<double>(position + 1) * e * (inst.ctr(h + position) - inst.ctr(h + position + 1));
  }
  return w.revenue[colluder] * revenue - w.payment * (own_share + between);
}

struct WupResult {
  BidProfile profile;
  double value = 0.0;
  std::vector<std::size_t> path;  // grid index per sorted position
};

/// Layered DAG: source, one layer of d level-nodes per colluder (in the order of
/// revenue weight times valuation, descending), sink. Arcs run between consecutive
/// layers towards equal or lower levels, so every path is an ordered profile.
/// Arc weights are tabulated once; with a distribution they are expectations.
class WupGraph {
public:
  /// Fixed external bid profile.
  WupGraph(LevelGrid grid, const WupWeights& weights, const AuctionInstance& inst, std::span<const double> external)
      : WupGraph(std::move(grid), weights, inst, point_mass(external)) {}

  /// Arc weights averaged over the instance's external distribution.
  static WupGraph expected(LevelGrid grid, const WupWeights& weights, const AuctionInstance& inst) {
    return WupGraph(std::move(grid), weights, inst, inst.external.support);
  }

  std::size_t num_colluders() const { return order_.size(); }
  std::size_t grid_size() const { return grid_.size(); }
  const LevelGrid& grid() const { return grid_; }
  std::span<const std::size_t> order() const { return order_; }

  std::size_t num_nodes() const { return grid_size() * num_colluders() + 2; }
  std::size_t num_arcs() const {
    const std::size_t d = grid_size();
    return d + (num_colluders() - 1) * d * (d + 1) / 2 + d;
  }

  /// Weight of the arc leaving layer `position` at grid index `from` towards grid
  /// index `to` of the next layer, or towards the sink when `to` is empty.
  double arc_weight(std::size_t position, std::size_t from, std::optional<std::size_t> to) const {
    const std::size_t d = grid_size();
    if (!to) {
      if (position + 1 != num_colluders()) throw std::out_of_range("WupGraph: only the last layer reaches the sink");
      return sink_[from];
    }
    if (position + 1 >= num_colluders() || *to < from) throw std::out_of_range("WupGraph: no such arc");
    return inner_[(position * d + from) * d + *to];
  }

  /// W_sigma of the path visiting grid indices `path` (one per layer, non-decreasing).
  double path_weight(std::span<const std::size_t> path) const {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) total += arc_weight(k, path[k], path[k + 1]);
    return total + arc_weight(path.size() - 1, path.back(), std::nullopt);
  }

  /// The bid profile a path encodes. Ranks decrease along the path, so colluders
  /// sharing a level are ordered as in the graph.
  BidProfile profile_for_path(std::span<const std::size_t> path) const {
    const std::size_t n = num_colluders();
    BidProfile profile;
    profile.bids.resize(n);
    for (std::size_t k = 0; k < n; ++k) profile[order_[k]] = Bid{grid_[path[k]], static_cast<int>(n - k)};
    return profile;
  }

  /// Longest source-sink path by backward dynamic programming over the layers.
  /// Among equal values the higher level wins, which keeps results deterministic.
  WupResult solve() const {
    const std::size_t n = num_colluders();
    const std::size_t d = grid_size();
    std::vector<double> best(n * d);
    std::vector<std::size_t> next(n * d, 0);
    for (std::size_t j = 0; j < d; ++j) best[(n - 1) * d + j] = sink_[j];
    for (std::size_t k = n - 1; k-- > 0;) {
      for (std::size_t j = 0; j < d; ++j) {
        double value = -std::numeric_limits<double>::infinity();
        for (std::size_t j2 = j; j2 < d; ++j2) {
          const double cand = inner_[(k * d + j) * d + j2] + best[(k + 1) * d + j2];
          if (cand > value) {
            value = cand;
            next[k * d + j] = j2;
          }
        }
        best[k * d + j] = value;
      }
    }
    WupResult result;
    std::size_t start = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (best[j] > best[start]) start = j;
    result.value = best[start];
    result.path.push_back(start);
    for (std::size_t k = 0; k + 1 < n; ++k) result.path.push_back(next[k * d + result.path.back()]);
    result.profile = profile_for_path(result.path);
    return result;
  }

private:
  static std::vector<SupportPoint> point_mass(std::span<const double> external) {
    SupportPoint point{{external.begin(), external.end()}, 1.0};
    std::sort(point.bids.begin(), point.bids.end(), std::greater<>());
    return {point};
  }

  WupGraph(LevelGrid grid, const WupWeights& weights, const AuctionInstance& inst, const std::vector<SupportPoint>& support)
      : grid_(std::move(grid)) {
    const std::size_t n = inst.num_colluders();
    weights.validate(n);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return weights.revenue[a] * inst.colluders[a].valuation > weights.revenue[b] * inst.colluders[b].valuation;
    });

    const std::size_t d = grid_.size();
    const auto weight_fn = inst.mechanism == Mechanism::GSP ? &arc_weight_gsp : &arc_weight_vcg;
    inner_.assign(n * d * d, 0.0);
    sink_.assign(d, 0.0);
    for (const auto& point : support) {
      for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t j2 = j; j2 < d; ++j2)
            inner_[(k * d + j) * d + j2] +=
                point.probability * weight_fn(k, order_[k], grid_[j], grid_[j2], point.bids, weights, inst);
      for (std::size_t j = 0; j < d; ++j)
        sink_[j] += point.probability * weight_fn(n - 1, order_[n - 1], grid_[j], std::nullopt, point.bids, weights, inst);
    }
  }

  LevelGrid grid_;
  std::vector<std::size_t> order_;
  std::vector<double> inner_;  // [position][from][to], positions 0..n-2
  std::vector<double> sink_;   // [from], last position
};

inline WupResult solve_wup_fixed(const LevelGrid& grid, const WupWeights& weights, std::span<const double> external,
                                 const AuctionInstance& inst) {
  return WupGraph(grid, weights, inst, external).solve();
}

inline WupResult solve_wup_expected(const LevelGrid& grid, const WupWeights& weights, const AuctionInstance& inst) {
  return WupGraph::expected(grid, weights, inst).solve();
}

}  // namespace agency
