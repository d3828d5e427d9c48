#pragma once

#include "agency/core_model.hpp"
#include "agency/discretization.hpp"
#include "agency/solution.hpp"

#include "json.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace agency::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& member(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline void only_keys(const Json& obj, std::set<std::string> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw InstanceError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

inline const Json& object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw InstanceError(path, "expected an object");
  return j;
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InstanceError(path, "expected an array");
  return j;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InstanceError(path, "expected a number");
  return j.get<double>();
}

inline std::vector<double> numbers(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t k = 0; k < array(j, path).size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace detail

/// Parses an instance document. Schema problems raise InstanceError with the
/// offending field path; value ranges are left to validate_and_normalize.
inline RawInstance parse_instance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InstanceError("$", std::string("malformed JSON: ") + e.what());
  }
  detail::object(doc, "$");
  detail::only_keys(doc, {"mechanism", "slots", "colluders", "external"}, "");

  RawInstance raw;
  const Json& mech = detail::member(doc, "mechanism", "");
  if (mech == "gsp")
    raw.mechanism = Mechanism::GSP;
  else if (mech == "vcg")
    raw.mechanism = Mechanism::VCG;
  else
    throw InstanceError("mechanism", "expected \"gsp\" or \"vcg\"");

  raw.slots = detail::numbers(detail::member(doc, "slots", ""), "slots");

  const Json& colluders = detail::array(detail::member(doc, "colluders", ""), "colluders");
  for (std::size_t i = 0; i < colluders.size(); ++i) {
    const std::string path = "colluders[" + std::to_string(i) + "]";
    const Json& c = detail::object(colluders[i], path);
    detail::only_keys(c, {"v", "t", "id"}, path);
    RawColluder rc;
    rc.v = detail::number(detail::member(c, "v", path), path + ".v");
    rc.t = detail::number(detail::member(c, "t", path), path + ".t");
    if (auto it = c.find("id"); it != c.end()) {
      if (!it->is_number_unsigned()) throw InstanceError(path + ".id", "expected a nonnegative integer");
      rc.id = it->get<std::size_t>();
    }
    raw.colluders.push_back(rc);
  }

  const Json& external = detail::object(detail::member(doc, "external", ""), "external");
  detail::only_keys(external, {"support"}, "external");
  const Json& support = detail::array(detail::member(external, "support", "external"), "external.support");
  for (std::size_t s = 0; s < support.size(); ++s) {
    const std::string path = "external.support[" + std::to_string(s) + "]";
    const Json& point = detail::object(support[s], path);
    detail::only_keys(point, {"bids", "prob"}, path);
    raw.support.push_back({detail::numbers(detail::member(point, "bids", path), path + ".bids"),
                           detail::number(detail::member(point, "prob", path), path + ".prob")});
  }
  return raw;
}

inline Json instance_json(const RawInstance& raw) {
  Json doc;
  doc["mechanism"] = to_string(raw.mechanism);
  doc["slots"] = raw.slots;
  doc["colluders"] = Json::array();
  for (const auto& c : raw.colluders) {
    Json j;
    j["v"] = c.v;
    j["t"] = c.t;
    if (c.id) j["id"] = *c.id;
    doc["colluders"].push_back(j);
  }
  doc["external"]["support"] = Json::array();
  for (const auto& point : raw.support) {
    Json j;
    j["bids"] = point.bids;
    j["prob"] = point.probability;
    doc["external"]["support"].push_back(j);
  }
  return doc;
}

/// Canonical text: two-space indentation, shortest round-trip numbers, trailing newline.
inline std::string serialize_instance(const RawInstance& raw) { return instance_json(raw).dump(2) + "\n"; }

/// Per-colluder values reordered from normalized order to original ids.
inline Json by_original_id(const AuctionInstance& inst, const std::vector<double>& values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[inst.colluders[i].id] = values[i];
  return out;
}

inline Json profile_json(const AuctionInstance& inst, const BidProfile& profile) {
  std::vector<Json> bids(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Json b;
    b["colluder"] = inst.colluders[i].id;
    b["level"] = profile[i].level;
    b["rank"] = profile[i].tie_rank;
    bids[inst.colluders[i].id] = b;
  }
  return bids;
}

inline Json grid_json(const Discretization& disc) {
  Json g;
  g["intervals"] = disc.intervals.size();
  g["eta"] = disc.eta();
  g["bits"] = disc.bits.bits;
  g["bits_capped"] = disc.bits.capped;
  g["levels"] = disc.grid.levels.size();
  g["ranks"] = disc.grid.ranks;
  g["interval_bound"] = disc.interval_bound();
  g["recursion_calls"] = disc.recursion_calls;
  g["level_values"] = std::vector<double>(disc.grid.levels.levels().begin(), disc.grid.levels.levels().end());
  return g;
}

inline Json solution_json(const AuctionInstance& inst, const AgencySolution& sol) {
  Json out;
  out["distribution"] = Json::array();
  for (const auto& wp : sol.distribution) {
    Json j;
    j["probability"] = wp.probability;
    j["bids"] = profile_json(inst, wp.profile);
    out["distribution"].push_back(j);
  }
  out["transfers"] = by_original_id(inst, sol.transfers);
  out["expected_revenue"] = by_original_id(inst, sol.expected_revenue);
  out["expected_payment"] = by_original_id(inst, sol.expected_payment);
  out["objective"] = sol.objective;
  out["relaxation"] = sol.relaxation;
  out["slacks"]["ic"] = by_original_id(inst, sol.slacks.ic);
  out["slacks"]["ir"] = sol.slacks.ir;
  out["slacks"]["ll"] = by_original_id(inst, sol.slacks.ll);
  return out;
}

}  // namespace agency::io
