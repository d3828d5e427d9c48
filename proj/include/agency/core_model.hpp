#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agency {

/// Absolute tolerance for every equality/inequality certificate in the library.
inline constexpr double kTolerance = 1e-9;

enum class Mechanism { GSP, VCG };

inline const char* to_string(Mechanism m) { return m == Mechanism::GSP ? "gsp" : "vcg"; }

/// Raised for malformed instances. `field()` is a path such as `colluders[1].v`.
class InstanceError : public std::invalid_argument {
public:
  InstanceError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// A bid as seen by the auctioneer: a price level plus a symbolic tie rank.
///
/// Rank 0 belongs to external agents, ranks 1..n_c to colluders. Bids compare by
/// level first and rank second, so at equal levels a colluder always beats an
/// external agent and a higher-ranked colluder beats a lower-ranked one. The rank
/// never enters a price.
struct Bid {
  double level = 0.0;
  int tie_rank = 0;

  friend std::partial_ordering operator<=>(const Bid& a, const Bid& b) {
    if (auto c = a.level <=> b.level; c != 0) return c;
    return a.tie_rank <=> b.tie_rank;
  }
  friend bool operator==(const Bid&, const Bid&) = default;
};

/// One bid per colluder, indexed like `AuctionInstance::colluders`.
struct BidProfile {
  std::vector<Bid> bids;

  std::size_t size() const { return bids.size(); }
  const Bid& operator[](std::size_t i) const { return bids[i]; }
  Bid& operator[](std::size_t i) { return bids[i]; }

  friend bool operator==(const BidProfile&, const BidProfile&) = default;
};

/// True when no two colluders share both level and rank.
inline bool has_distinct_ties(const BidProfile& profile) {
  for (std::size_t a = 0; a < profile.size(); ++a)
    for (std::size_t b = a + 1; b < profile.size(); ++b)
      if (profile[a] == profile[b]) return false;
  return true;
}

struct SupportPoint {
  std::vector<double> bids;  // descending after normalization
  double probability = 0.0;
};

/// Finite-support distribution over external bid profiles.
struct ExternalDistribution {
  std::vector<SupportPoint> support;

  std::size_t num_agents() const {
    std::size_t n = 0;
    for (const auto& s : support) n = std::max(n, s.bids.size());
    return n;
  }
};

struct Colluder {
  double valuation = 0.0;
  double outside_option = 0.0;
  std::size_t id = 0;  // index in the instance as originally supplied
};

/// A validated, normalized instance: slots by click-through rate descending,
/// colluders by valuation descending, each external profile descending.
struct AuctionInstance {
  std::vector<double> slots;
  std::vector<Colluder> colluders;
  ExternalDistribution external;
  Mechanism mechanism = Mechanism::GSP;

  std::size_t num_slots() const { return slots.size(); }
  std::size_t num_colluders() const { return colluders.size(); }

  /// Click-through rate of the 0-based slot; zero past the last slot.
  double ctr(std::size_t slot) const { return slot < slots.size() ? slots[slot] : 0.0; }
};

/// Unvalidated instance, as read from a file.
struct RawColluder {
  double v = 0.0;
  double t = 0.0;
  std::optional<std::size_t> id;
};

struct RawInstance {
  Mechanism mechanism = Mechanism::GSP;
  std::vector<double> slots;
  std::vector<RawColluder> colluders;
  std::vector<SupportPoint> support;
};

namespace detail {

inline void check_unit(double x, const std::string& field) {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw InstanceError(field, "value must lie in [0, 1]");
}

}  // namespace detail

/// Validates ranges and sizes, then sorts into canonical order. Probabilities that
/// drift from 1 by less than 1e-9 are renormalized; larger drift is an error. An
/// empty support list stands for "no external agents".
inline AuctionInstance validate_and_normalize(const RawInstance& raw) {
  AuctionInstance inst;
  inst.mechanism = raw.mechanism;

  if (raw.slots.empty()) throw InstanceError("slots", "at least one slot is required");
  for (std::size_t j = 0; j < raw.slots.size(); ++j)
    detail::check_unit(raw.slots[j], "slots[" + std::to_string(j) + "]");
  inst.slots = raw.slots;
  std::sort(inst.slots.begin(), inst.slots.end(), std::greater<>());

  if (raw.colluders.empty()) throw InstanceError("colluders", "at least one colluder is required");
  std::vector<bool> seen(raw.colluders.size(), false);
  for (std::size_t i = 0; i < raw.colluders.size(); ++i) {
    const auto& c = raw.colluders[i];
    const std::string path = "colluders[" + std::to_string(i) + "]";
    detail::check_unit(c.v, path + ".v");
    detail::check_unit(c.t, path + ".t");
    std::size_t id = c.id.value_or(i);
    if (id >= raw.colluders.size() || seen[id]) throw InstanceError(path + ".id", "ids must be a permutation of 0..n_c-1");
    seen[id] = true;
    inst.colluders.push_back({c.v, c.t, id});
  }
  std::stable_sort(inst.colluders.begin(), inst.colluders.end(), [](const Colluder& a, const Colluder& b) {
    if (a.valuation != b.valuation) return a.valuation > b.valuation;
    return a.id < b.id;
  });

  double total = 0.0;
  for (std::size_t s = 0; s < raw.support.size(); ++s) {
    const auto& point = raw.support[s];
    const std::string path = "external.support[" + std::to_string(s) + "]";
    detail::check_unit(point.probability, path + ".prob");
    for (std::size_t k = 0; k < point.bids.size(); ++k)
      detail::check_unit(point.bids[k], path + ".bids[" + std::to_string(k) + "]");
    SupportPoint sorted = point;
    std::sort(sorted.bids.begin(), sorted.bids.end(), std::greater<>());
    inst.external.support.push_back(std::move(sorted));
    total += point.probability;
  }
  if (inst.external.support.empty()) {
    inst.external.support.push_back({{}, 1.0});
  } else {
    if (std::abs(total - 1.0) > 1e-9) throw InstanceError("external.support", "probabilities sum to " + std::to_string(total));
    // Only touch sums that are visibly off, so a second pass is a no-op.
    if (std::abs(total - 1.0) > 1e-12)
      for (auto& point : inst.external.support) point.probability /= total;
  }

  if (inst.num_slots() > inst.num_colluders() + inst.external.num_agents())
    throw InstanceError("slots", "more slots than agents");
  return inst;
}

/// Inverse view of a normalized instance; feeding it back through
/// `validate_and_normalize` is the identity.
inline RawInstance to_raw(const AuctionInstance& inst) {
  RawInstance raw;
  raw.mechanism = inst.mechanism;
  raw.slots = inst.slots;
  for (const auto& c : inst.colluders) raw.colluders.push_back({c.valuation, c.outside_option, c.id});
  raw.support = inst.external.support;
  return raw;
}

/// Distinct bid levels, strictly descending. This is the value set a WUP ranges over.
class LevelGrid {
public:
  LevelGrid() = default;
  explicit LevelGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    std::sort(levels_.begin(), levels_.end(), std::greater<>());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
    if (levels_.empty()) throw std::invalid_argument("LevelGrid: empty grid");
  }

  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t j) const { return levels_[j]; }
  std::span<const double> levels() const { return levels_; }

private:
  std::vector<double> levels_;
};

}  // namespace agency
