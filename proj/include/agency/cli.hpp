#pragma once

#include "agency/arbitrary_solver.hpp"
#include "agency/core_model.hpp"
#include "agency/discretization.hpp"
#include "agency/io.hpp"
#include "agency/ll_solver.hpp"
#include "agency/mechanisms.hpp"
#include "agency/wup.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace agency::cli {

enum ExitCode : int { kOk = 0, kInvalidInstance = 1, kInfeasible = 2, kToleranceBreach = 3 };

struct CommandResult {
  int exit_code = kOk;
  std::string output;
};

enum class Format { Json, Text };

struct SolveOptions {
  enum class Mode { Arbitrary, LimitedLiability };
  Mode mode = Mode::Arbitrary;
  double epsilon = 0.05;
  std::optional<Mechanism> mechanism;
  Format format = Format::Json;
  LlOptions ll;
};

/// Tolerance for the LP value against the recertified objective.
inline constexpr double kLpAgreement = 1e-7;

namespace detail {

using Json = io::Json;
using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline CommandResult invalid(const InstanceError& e) {
  Json j;
  j["valid"] = false;
  j["field"] = e.field();
  j["error"] = e.what();
  return {kInvalidInstance, j.dump(2) + "\n"};
}

inline CommandResult usage_error(const std::string& message) {
  Json j;
  j["error"] = message;
  return {kInvalidInstance, j.dump(2) + "\n"};
}

inline AuctionInstance load(const std::string& text, std::optional<Mechanism> mechanism = std::nullopt) {
  RawInstance raw = io::parse_instance(text);
  if (mechanism) raw.mechanism = *mechanism;
  return validate_and_normalize(raw);
}

inline Json baseline_json(const AuctionInstance& inst, double objective) {
  const std::vector<double> u = individual_baseline(inst);
  double total = 0.0;
  for (double x : u) total += x;
  Json b;
  b["individual"] = io::by_original_id(inst, u);
  b["total"] = total;
  b["with_agency"] = objective;
  if (total > 0.0)
    b["ratio"] = objective / total;
  else
    b["ratio"] = nullptr;
  return b;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

inline std::string text_report(const Json& r) {
  std::ostringstream os;
  os << "mode        " << r["mode"].get<std::string>() << " (" << r["mechanism"].get<std::string>() << ")\n";
  os << "status      " << r["status"].get<std::string>() << "\n";
  os << "epsilon     " << fmt(r["epsilon"].get<double>()) << "   p " << fmt(r["p"].get<double>()) << "\n";
  const Json& g = r["grid"];
  os << "grid        " << g["intervals"].get<std::size_t>() << " intervals, " << g["levels"].get<std::size_t>()
     << " levels, eta 2^-" << g["bits"].get<int>() << "\n";
  if (r.contains("solution")) {
    const Json& s = r["solution"];
    os << "objective   " << fmt(s["objective"].get<double>()) << "\n";
    for (const auto& wp : s["distribution"]) {
      os << "  " << fmt(wp["probability"].get<double>()) << " :";
      for (const auto& b : wp["bids"])
        os << "  c" << b["colluder"].get<std::size_t>() << "=" << fmt(b["level"].get<double>()) << "/"
           << b["rank"].get<int>();
      os << "\n";
    }
    os << "transfers  ";
    for (const auto& q : s["transfers"]) os << " " << fmt(q.get<double>());
    os << "\n";
    os << "ir slack    " << fmt(s["slacks"]["ir"].get<double>()) << "\n";
  }
  const Json& b = r["baseline"];
  os << "baseline    " << fmt(b["total"].get<double>());
  if (!b["ratio"].is_null()) os << "   ratio " << fmt(b["ratio"].get<double>());
  os << "\n";
  return os.str();
}

}  // namespace detail

inline CommandResult cmd_validate(const std::string& text) {
  try {
    const AuctionInstance inst = detail::load(text);
    detail::Json j;
    j["valid"] = true;
    j["mechanism"] = to_string(inst.mechanism);
    j["slots"] = inst.num_slots();
    j["colluders"] = inst.num_colluders();
    j["external_agents"] = inst.external.num_agents();
    j["support_size"] = inst.external.support.size();
    return {kOk, j.dump(2) + "\n"};
  } catch (const InstanceError& e) {
    return detail::invalid(e);
  }
}

inline CommandResult cmd_discretize(const std::string& text, double p) {
  try {
    const AuctionInstance inst = detail::load(text);
    if (!(p > 0.0 && p <= 1.0)) return detail::usage_error("--p must lie in (0, 1]");
    const Discretization disc = build_grid(inst, p);
    detail::Json j;
    j["p"] = p;
    j["grid"] = io::grid_json(disc);
    j["interval_list"] = detail::Json::array();
    for (const auto& iv : disc.intervals.intervals) {
      detail::Json e;
      e["lower"] = iv.lower;
      e["upper"] = iv.upper;
      e["probability"] = event_probability(inst.external, iv);
      j["interval_list"].push_back(e);
    }
    return {kOk, j.dump(2) + "\n"};
  } catch (const InstanceError& e) {
    return detail::invalid(e);
  }
}

/// Runs one of the two schemes and reports a recertified solution. Exit code 2
/// flags an infeasible instance, 3 a certificate that misses its tolerance.
inline CommandResult cmd_solve(const std::string& text, const SolveOptions& opt = {}) {
  const auto t0 = detail::Clock::now();
  AuctionInstance inst;
  try {
    inst = detail::load(text, opt.mechanism);
  } catch (const InstanceError& e) {
    return detail::invalid(e);
  }
  if (!(opt.epsilon > 0.0 && opt.epsilon <= 1.0)) return detail::usage_error("--epsilon must lie in (0, 1]");

  detail::Json r;
  const bool ll = opt.mode == SolveOptions::Mode::LimitedLiability;
  r["mode"] = ll ? "limited-liability" : "arbitrary";
  r["mechanism"] = to_string(inst.mechanism);
  r["epsilon"] = opt.epsilon;
  int code = kOk;
  std::optional<AgencySolution> sol;
  const auto t_solve = detail::Clock::now();

  if (!ll) {
    const ArbitraryResult res = solve_arbitrary(inst, opt.epsilon);
    r["p"] = res.p;
    r["grid"] = io::grid_json(res.discretization);
    r["status"] = res.outside_options_unattainable ? "outside-options-unattainable" : "optimal";
    sol = res.solution;
    if (res.outside_options_unattainable) code = kInfeasible;
    for (double s : res.solution.slacks.ic)
      if (std::abs(s) > kTolerance) code = kToleranceBreach;
  } else {
    const LlResult res = solve_ll(inst, opt.epsilon, opt.ll);
    r["p"] = res.p;
    r["grid"] = io::grid_json(res.discretization);
    r["status"] = to_string(res.status);
    detail::Json s;
    s["path"] = res.dense ? "dense" : "column-generation";
    s["columns"] = res.num_columns;
    s["pricing_rounds"] = res.pricing_rounds;
    if (res.status == LlStatus::Infeasible) {
      code = kInfeasible;
      s["witness_found"] = res.witness.witness_found;
      s["witness_search_exhaustive"] = res.witness.exhaustive;
      s["profiles_checked"] = res.witness.profiles_checked;
    } else {
      sol = res.solution;
      s["lp_value"] = res.lp_value;
      s["dual_value"] = res.dual_value;
      if (res.status == LlStatus::RoundLimit) code = kToleranceBreach;
      if (!sol->ic_feasible() || !sol->ir_feasible() || !sol->ll_feasible() ||
          std::abs(res.lp_value - sol->objective) > kLpAgreement)
        code = kToleranceBreach;
    }
    r["solver"] = s;
  }
  const double solve_ms = detail::ms_since(t_solve);

  if (sol) r["solution"] = io::solution_json(inst, *sol);
  r["baseline"] = detail::baseline_json(inst, sol ? sol->objective : 0.0);
  r["timings_ms"]["solve"] = solve_ms;
  r["timings_ms"]["total"] = detail::ms_since(t0);
  return {code, opt.format == Format::Json ? r.dump(2) + "\n" : detail::text_report(r)};
}

/// Weights document: {"revenue": [...one per colluder, original order...], "payment": x}.
inline WupWeights parse_weights(const std::string& text, const AuctionInstance& inst) {
  io::Json doc;
  try {
    doc = io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    throw InstanceError("weights", std::string("malformed JSON: ") + e.what());
  }
  io::detail::object(doc, "weights");
  const std::vector<double> revenue = io::detail::numbers(io::detail::member(doc, "revenue", "weights"), "weights.revenue");
  if (revenue.size() != inst.num_colluders()) throw InstanceError("weights.revenue", "one weight per colluder required");
  WupWeights w;
  w.revenue.resize(revenue.size());
  for (std::size_t i = 0; i < revenue.size(); ++i) w.revenue[i] = revenue[inst.colluders[i].id];
  w.payment = io::detail::number(io::detail::member(doc, "payment", "weights"), "weights.payment");
  for (std::size_t i = 0; i < revenue.size(); ++i)
    if (!(revenue[i] >= 0.0)) throw InstanceError("weights.revenue[" + std::to_string(i) + "]", "must be nonnegative");
  if (!(w.payment >= 0.0)) throw InstanceError("weights.payment", "must be nonnegative");
  return w;
}

/// Solves one weighted utility problem on the grid for p = epsilon / n_c, either
/// against support point `external_index` or in expectation.
inline CommandResult cmd_wup(const std::string& text, const std::optional<std::string>& weights_text,
                             std::optional<std::size_t> external_index, double epsilon = 0.05) {
  try {
    const AuctionInstance inst = detail::load(text);
    const WupWeights w = weights_text ? parse_weights(*weights_text, inst) : WupWeights::unit(inst.num_colluders());
    if (!(epsilon > 0.0 && epsilon <= 1.0)) return detail::usage_error("--epsilon must lie in (0, 1]");
    const Discretization disc = build_grid(inst, ArbitraryParams{epsilon}.p(inst.num_colluders()));
    detail::Json j;
    WupResult res;
    if (external_index) {
      if (*external_index >= inst.external.support.size())
        throw InstanceError("external.support[" + std::to_string(*external_index) + "]", "no such support point");
      res = solve_wup_fixed(disc.grid.levels, w, inst.external.support[*external_index].bids, inst);
      j["external"] = *external_index;
    } else {
      res = solve_wup_expected(disc.grid.levels, w, inst);
      j["external"] = "expected";
    }
    j["grid"] = io::grid_json(disc);
    j["profile"] = io::profile_json(inst, res.profile);
    j["value"] = res.value;
    return {kOk, j.dump(2) + "\n"};
  } catch (const InstanceError& e) {
    return detail::invalid(e);
  }
}

/// Truthful individual bidding against the arbitrary-transfers agency solution.
inline CommandResult cmd_baseline(const std::string& text, double epsilon = 0.05) {
  try {
    const AuctionInstance inst = detail::load(text);
    if (!(epsilon > 0.0 && epsilon <= 1.0)) return detail::usage_error("--epsilon must lie in (0, 1]");
    const ArbitraryResult res = solve_arbitrary(inst, epsilon);
    detail::Json j;
    j["epsilon"] = epsilon;
    j["baseline"] = detail::baseline_json(inst, res.solution.objective);
    j["outside_options"] = io::by_original_id(inst, [&] {
      std::vector<double> t;
      for (const auto& c : inst.colluders) t.push_back(c.outside_option);
      return t;
    }());
    return {kOk, j.dump(2) + "\n"};
  } catch (const InstanceError& e) {
    return detail::invalid(e);
  }
}

}  // namespace agency::cli
