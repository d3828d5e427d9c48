// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "agency/agency.hpp"
#include "agency/cli.hpp"
#include "agency/reference_oracles.hpp"
#include "support/random_instance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace agency;
using agency::test_support::InstanceGenerator;
using agency::test_support::InstanceShape;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string instance_path(const char* name) { return std::string(AGENCY_INSTANCE_DIR) + "/" + name; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LevelGrid random_levels(InstanceGenerator& gen, std::size_t d) {
  std::vector<double> pool;
  for (int k = 0; k <= 8; ++k) pool.push_back(k / 8.0);
  std::shuffle(pool.begin(), pool.end(), gen.rng());
  pool.resize(d);
  return LevelGrid(pool);
}

void for_each_path(std::size_t d, std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> path(n, 0);
  for (;;) {
    f(path);
    std::size_t k = n;
    while (k > 0 && path[k - 1] == d - 1) --k;
    if (k == 0) return;
    const std::size_t v = path[k - 1] + 1;
    for (std::size_t j = k - 1; j < n; ++j) path[j] = v;
  }
}

double weighted(const WupWeights& w, const std::vector<double>& r, const std::vector<double>& pi) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += w.revenue[i] * r[i] - w.payment * pi[i];
  return s;
}

Verdict path_weight_identity() {
  InstanceGenerator gen(101);
  const InstanceShape shape{4, 3, 5, 3, 3, 0.0};
  std::size_t paths = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const AuctionInstance inst = gen.next(shape);
    const LevelGrid grid = random_levels(gen, gen.uniform(1, 6));
    const WupWeights w{gen.weights(inst.num_colluders()), 2.0 * gen.unit()};
    const auto& support = inst.external.support;
    const std::vector<double>& ext = support[gen.uniform(0, support.size() - 1)].bids;
    std::vector<double> shuffled = ext;
    std::shuffle(shuffled.begin(), shuffled.end(), gen.rng());
    const WupGraph fixed(grid, w, inst, shuffled);
    const WupGraph expected = WupGraph::expected(grid, w, inst);
    for_each_path(grid.size(), inst.num_colluders(), [&](const std::vector<std::size_t>& path) {
      const BidProfile b = fixed.profile_for_path(path);
      const Outcome o = evaluate(b, ext, inst);
      const ExpectedOutcome e = expected_outcome(b, inst);
      const double err = std::max(std::abs(fixed.path_weight(path) - weighted(w, o.colluder_revenue, o.colluder_payment)),
                                  std::abs(expected.path_weight(path) - weighted(w, e.revenue, e.payment)));
      worst = std::max(worst, err);
      if (err > 1e-9) ++bad;
      ++paths;
    });
  }
  return {bad == 0, fmt("%zu paths on 1000 instances, %zu mismatches, max error %.2e", paths, bad, worst)};
}

Verdict wup_optimality() {
  InstanceGenerator gen(202);
  const InstanceShape shape{4, 3, 5, 3, 3, 0.0};
  std::size_t bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const AuctionInstance inst = gen.next(shape);
    const LevelGrid grid = random_levels(gen, gen.uniform(1, 6));
    const WupWeights w{gen.weights(inst.num_colluders()), 2.0 * gen.unit()};
    const WupResult dp = solve_wup_expected(grid, w, inst);
    const oracle::BestProfile bf = oracle::brute_force_wup(grid.levels(), w.revenue, w.payment, inst);
    const oracle::Totals t = oracle::expected_totals(dp.profile, inst);
    const double err = std::max(std::abs(dp.value - bf.value), std::abs(weighted(w, t.revenue, t.payment) - bf.value));
    worst = std::max(worst, err);
    if (err > 1e-9) ++bad;
  }
  return {bad == 0, fmt("1000 instances, %zu mismatches, max error %.2e", bad, worst)};
}

Verdict vcg_checks() {
  InstanceGenerator gen(303);
  std::size_t bad_formula = 0, bad_truth = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = gen.uniform(1, 6);
    const std::size_t m = gen.uniform(1, 5);
    std::vector<double> ctr;
    for (std::size_t j = 0; j < m; ++j) ctr.push_back(gen.unit());
    std::sort(ctr.begin(), ctr.end(), std::greater<>());
    BidProfile b;
    for (std::size_t i = 0; i < n; ++i) b.bids.push_back({gen.coin() ? gen.dyadic(2) : gen.unit(), static_cast<int>(n - i)});
    std::vector<double> ext;
    for (std::size_t h = gen.uniform(0, 2); h > 0; --h) ext.push_back(gen.dyadic(2));
    const Ranking ranking = allocate(b, ext);
    const std::vector<double> closed = payments_vcg(ranking, ctr);
    const std::vector<double> direct = oracle::vcg_externality(ranking, ctr);
    for (std::size_t k = 0; k < ranking.size(); ++k) {
      worst = std::max(worst, std::abs(closed[k] - direct[k]));
      if (std::abs(closed[k] - direct[k]) > 1e-12) ++bad_formula;
    }
  }

  std::size_t deviations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RawInstance raw;
    raw.mechanism = Mechanism::VCG;
    const std::size_t n = gen.uniform(1, 6);
    for (std::size_t j = gen.uniform(1, n); j > 0; --j) raw.slots.push_back(gen.unit());
    for (std::size_t i = 0; i < n; ++i) raw.colluders.push_back({gen.unit(), 0.0, {}});
    const AuctionInstance inst = validate_and_normalize(raw);
    const BidProfile truthful = truthful_profile(inst);
    const Outcome base = evaluate(truthful, {}, inst);
    for (std::size_t i = 0; i < n; ++i) {
      const double u0 = base.colluder_revenue[i] - base.colluder_payment[i];
      for (int g = 0; g < 8; ++g) {
        BidProfile dev = truthful;
        dev[i].level = g / 7.0;
        const Outcome o = evaluate(dev, {}, inst);
        ++deviations;
        if (o.colluder_revenue[i] - o.colluder_payment[i] > u0 + 1e-9) ++bad_truth;
      }
    }
  }
  return {bad_formula == 0 && bad_truth == 0,
          fmt("closed form vs externality: max error %.2e, %zu mismatches; %zu deviations, %zu profitable", worst,
              bad_formula, deviations, bad_truth)};
}

Verdict rec_guarantees() {
  InstanceGenerator gen(404);
  std::size_t bad = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ExternalDistribution dist;
    const std::size_t n_e = gen.uniform(1, 4);
    const int bits = static_cast<int>(gen.uniform(1, 10));
    const std::size_t s = gen.uniform(1, 5);
    double total = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      SupportPoint point{{}, 0.1 + gen.unit()};
      total += point.probability;
      for (std::size_t h = 0; h < n_e; ++h) point.bids.push_back(gen.dyadic(bits));
      dist.support.push_back(point);
    }
    // Pin the bit length so eta = 2^-bits exactly.
    dist.support[0].bids[0] = std::ldexp(1.0, -bits);
    for (auto& point : dist.support) point.probability /= total;

    const double p = 0.01 + 0.49 * gen.unit();
    RawInstance raw;
    raw.slots = {1.0};
    raw.colluders = {{0.5, 0.0, {}}};
    raw.support = dist.support;
    const AuctionInstance inst = validate_and_normalize(raw);
    const Discretization disc = build_grid(inst, p);
    const auto& ivs = disc.intervals.intervals;

    bool ok = !ivs.empty() && ivs.front().lower == 0.0 && ivs.back().upper == 1.0;
    for (std::size_t k = 0; k + 1 < ivs.size(); ++k) ok = ok && ivs[k].upper == ivs[k + 1].lower;
    for (const auto& iv : ivs)
      ok = ok && iv.lower < iv.upper && (event_probability(inst.external, iv) <= p || iv.width() <= disc.eta());
    const double bound = disc.interval_bound();
    ok = ok && static_cast<double>(ivs.size()) <= bound && disc.recursion_calls <= 2 * ivs.size();
    tightest = std::max(tightest, static_cast<double>(ivs.size()) / bound);
    if (!ok) ++bad;
  }
  return {bad == 0, fmt("100 distributions, %zu violations, max k*/bound %.3f", bad, tightest)};
}

Verdict rounded_bid_loss() {
  InstanceGenerator gen(505);
  const InstanceShape shape{4, 3, 5, 3, 4, 0.0};
  std::size_t bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const AuctionInstance inst = gen.next(shape);
    const double p = 0.02 + 0.3 * gen.unit();
    const Discretization disc = build_grid(inst, p);
    BidProfile original;
    const std::size_t n = inst.num_colluders();
    for (std::size_t i = 0; i < n; ++i) original.bids.push_back({gen.unit(), static_cast<int>(n - i)});
    const BidProfile rounded = project_profile(disc.grid, original);
    const ExpectedOutcome a = expected_outcome(original, inst);
    const ExpectedOutcome b = expected_outcome(rounded, inst);
    for (std::size_t i = 0; i < n; ++i)
      if (b.payment[i] > a.payment[i] + 1e-9 || b.revenue[i] < a.revenue[i] - p - 1e-9) {
        ++bad;
        break;
      }
  }
  return {bad == 0, fmt("200 pairs, %zu violations", bad)};
}

Verdict arbitrary_fptas() {
  InstanceGenerator gen(606);
  const InstanceShape shape{3, 3, 4, 3, 4, 0.3};
  std::vector<double> fine;
  for (int k = 0; k <= 64; ++k) fine.push_back(k / 64.0);
  std::size_t bad = 0, accepted = 0, rejected = 0;
  double worst_gap = -1.0, worst_ic = 0.0, worst_ir = std::numeric_limits<double>::infinity();
  while (accepted < 50) {
    const AuctionInstance inst = gen.next(shape);
    const double eps = 0.1;
    const Discretization disc = build_grid(inst, ArbitraryParams{eps}.p(inst.num_colluders()));
    if (!find_witness_profile(inst, disc).witness_found) {
      ++rejected;
      continue;
    }
    ++accepted;
    const ArbitraryResult res = solve_arbitrary(inst, eps);
    const double opt = oracle::brute_force_arbitrary(inst, fine).value;
    const double gap = opt - res.solution.objective;
    worst_gap = std::max(worst_gap, gap);
    double ic = 0.0;
    for (double s : res.solution.slacks.ic) ic = std::max(ic, std::abs(s));
    worst_ic = std::max(worst_ic, ic);
    worst_ir = std::min(worst_ir, res.solution.slacks.ir);
    if (gap > eps || ic > 1e-12 || res.solution.slacks.ir < -1e-9) ++bad;
  }
  return {bad == 0, fmt("50 instances (%zu resampled), %zu failures, max OPT gap %.4f, max |IC slack| %.1e, min IR slack %.2e",
                        rejected, bad, worst_gap, worst_ic, worst_ir)};
}

Verdict agency_gain() {
  const AuctionInstance inst = validate_and_normalize(io::parse_instance(read_file(instance_path("agency_gain.json"))));
  const ArbitraryResult res = solve_arbitrary(inst, 0.05);
  double base = 0.0;
  for (double u : individual_baseline(inst)) base += u;
  const double ratio = res.solution.objective / base;

  const auto report = io::Json::parse(cli::cmd_solve(read_file(instance_path("agency_gain.json"))).output);
  const double cli_ratio = report["baseline"]["ratio"].get<double>();
  const bool ok = std::abs(res.solution.objective - 0.6) <= 1e-9 && std::abs(base - 0.1) <= 1e-9 &&
                  std::abs(ratio - 6.0) <= 1e-9 && std::abs(cli_ratio - 6.0) <= 1e-9;
  return {ok, fmt("objective %.12f, baseline %.12f, ratio %.12f (report %.12f)", res.solution.objective, base, ratio,
                  cli_ratio)};
}

Verdict randomization_gap() {
  const AuctionInstance inst = validate_and_normalize(io::parse_instance(read_file(instance_path("randomization_gap.json"))));
  const double eps = 0.01;
  const LlResult dense = solve_ll(inst, eps);
  LlOptions cg_opt;
  cg_opt.strategy = LlOptions::Strategy::ColumnGeneration;
  const LlResult cg = solve_ll(inst, eps, cg_opt);
  const oracle::BestProfile det =
      oracle::brute_force_deterministic_ll(inst, dense.discretization.grid.levels.levels(), dense.p);
  const bool ok = dense.status == LlStatus::Optimal && std::abs(dense.solution.objective - 1.0) <= 1e-6 &&
                  dense.solution.distribution.size() >= 2 && cg.status == LlStatus::Optimal &&
                  std::abs(cg.solution.objective - 1.0) <= 1e-6 && cg.solution.distribution.size() >= 2 &&
                  std::abs(det.value - 0.5) <= 1e-6 && dense.solution.ll_feasible() && dense.solution.ir_feasible() &&
                  dense.solution.ic_feasible();
  return {ok, fmt("epsilon %.2f: LL value %.9f over %zu columns (column generation %.9f over %zu), best single column %.9f",
                  eps, dense.solution.objective, dense.solution.distribution.size(), cg.solution.objective,
                  cg.solution.distribution.size(), det.value)};
}

Verdict cg_vs_dense() {
  InstanceGenerator gen(909);
  const InstanceShape shape{3, 3, 4, 3, 4, 0.25};
  std::size_t compared = 0, bad = 0, infeasible_pairs = 0, max_rounds = 0;
  double worst = 0.0;
  LlOptions dense_opt, cg_opt;
  dense_opt.strategy = LlOptions::Strategy::Dense;
  cg_opt.strategy = LlOptions::Strategy::ColumnGeneration;
  while (compared < 50) {
    const AuctionInstance inst = gen.next(shape);
    const double eps = 0.05 + 0.2 * gen.unit();
    const LlResult d = solve_ll(inst, eps, dense_opt);
    const LlResult c = solve_ll(inst, eps, cg_opt);
    max_rounds = std::max(max_rounds, c.pricing_rounds);
    if (d.status == LlStatus::Infeasible) {
      ++infeasible_pairs;
      if (c.status != LlStatus::Infeasible) ++bad;
      continue;
    }
    ++compared;
    const double err = std::abs(d.solution.objective - c.solution.objective);
    worst = std::max(worst, err);
    if (c.status != LlStatus::Optimal || err > 1e-6 || c.pricing_rounds > 200) ++bad;
  }
  return {bad == 0, fmt("50 feasible instances (+%zu infeasible, matched), %zu failures, max gap %.2e, max %zu pricing rounds",
                        infeasible_pairs, bad, worst, max_rounds)};
}

std::string strip_timings(const std::string& report) {
  auto j = io::Json::parse(report);
  j.erase("timings_ms");
  return j.dump();
}

Verdict determinism() {
  std::size_t runs = 0, bad = 0;
  for (const char* name : {"agency_gain.json", "randomization_gap.json"}) {
    const std::string text = read_file(instance_path(name));
    for (auto mode : {cli::SolveOptions::Mode::Arbitrary, cli::SolveOptions::Mode::LimitedLiability}) {
      cli::SolveOptions opt;
      opt.mode = mode;
      const std::string first = strip_timings(cli::cmd_solve(text, opt).output);
      for (int rep = 0; rep < 5; ++rep, ++runs)
        if (strip_timings(cli::cmd_solve(text, opt).output) != first) ++bad;
    }
  }
  return {bad == 0, fmt("%zu repeated solves, %zu differing reports", runs, bad)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
    double time_limit;  // seconds, 0 for none
  };
  const Criterion criteria[] = {
      {1, "path weights equal mechanism utilities", path_weight_identity, 30.0},
      {2, "WUP optimum equals brute force", wup_optimality, 30.0},
      {3, "VCG closed form and truthfulness", vcg_checks, 0.0},
      {4, "interval splitting guarantees", rec_guarantees, 0.0},
      {5, "rounded bids lose at most p", rounded_bid_loss, 0.0},
      {6, "arbitrary-transfers scheme within epsilon", arbitrary_fptas, 0.0},
      {7, "agency gain golden values", agency_gain, 0.0},
      {8, "randomization gap golden values", randomization_gap, 0.0},
      {9, "column generation matches dense LP", cg_vs_dense, 0.0},
      {10, "repeatable reports", determinism, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      v.pass = false;
      v.detail += fmt(" [over the %.0f s limit]", c.time_limit);
    }
    if (!v.pass) ++failures;
    std::printf("%s  criterion %2d  %-42s %7.2fs  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
