#include "agency/arbitrary_solver.hpp"
#include "agency/reference_oracles.hpp"
#include "support/random_instance.hpp"

#include <gtest/gtest.h>

using namespace agency;

namespace {

AuctionInstance agency_gain() {
  RawInstance raw;
  raw.slots = {1.0};
  raw.colluders = {{0.6, 0.1, {}}, {0.5, 0.0, {}}};
  raw.support = {{{0.0}, 1.0}};
  return validate_and_normalize(raw);
}

}  // namespace

TEST(ArbitraryParams, ThresholdAndRange) {
  EXPECT_DOUBLE_EQ(ArbitraryParams{0.1}.p(4), 0.025);
  EXPECT_THROW(ArbitraryParams{0.0}.validate(), std::invalid_argument);
  EXPECT_THROW(ArbitraryParams{1.5}.validate(), std::invalid_argument);
  EXPECT_NO_THROW(ArbitraryParams{1.0}.validate());
}

TEST(SolveArbitrary, AgencyGain) {
  const AuctionInstance inst = agency_gain();
  const ArbitraryResult r = solve_arbitrary(inst, 0.05);
  EXPECT_NEAR(r.solution.objective, 0.6, 1e-12);
  EXPECT_EQ(r.solution.distribution.size(), 1u);
  EXPECT_DOUBLE_EQ(r.p, 0.025);
  EXPECT_FALSE(r.outside_options_unattainable);
  EXPECT_NEAR(r.solution.transfers[0], 0.6 - 0.1 + 0.025, 1e-12);
  EXPECT_NEAR(r.solution.transfers[1], 0.0 - 0.0 + 0.025, 1e-12);
  for (double s : r.solution.slacks.ic) EXPECT_NEAR(s, 0.0, 1e-12);
  EXPECT_GE(r.solution.slacks.ir, -1e-9);
}

TEST(SolveArbitrary, InfeasibleOutsideOptionsFlagged) {
  RawInstance raw;
  raw.slots = {0.5};
  raw.colluders = {{1.0, 1.0, {}}};
  const AuctionInstance inst = validate_and_normalize(raw);
  const ArbitraryResult r = solve_arbitrary(inst, 0.1);
  EXPECT_TRUE(r.outside_options_unattainable);
  EXPECT_FALSE(find_witness_profile(inst, r.discretization).witness_found);
  EXPECT_TRUE(find_witness_profile(inst, r.discretization).exhaustive);
}

TEST(FindWitness, FindsWitness) {
  const AuctionInstance inst = agency_gain();
  const Discretization d = build_grid(inst, 0.025);
  const WitnessSearch rep = find_witness_profile(inst, d);
  ASSERT_TRUE(rep.witness_found);
  const ExpectedOutcome e = expected_outcome(*rep.witness, inst);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_GE(e.revenue[i] - e.payment[i], inst.colluders[i].outside_option - 0.025 - 1e-9);
}

TEST(FindWitness, TruncatedSearchIsNotExhaustive) {
  RawInstance raw;
  raw.slots = {0.5};
  raw.colluders = {{1.0, 1.0, {}}, {1.0, 1.0, {}}};
  raw.support = {{{0.5, 0.25}, 1.0}};
  const AuctionInstance inst = validate_and_normalize(raw);
  const WitnessSearch rep = find_witness_profile(inst, build_grid(inst, 0.01), 2);
  EXPECT_FALSE(rep.witness_found);
  EXPECT_FALSE(rep.exhaustive);
  EXPECT_EQ(rep.profiles_checked, 2u);
}

TEST(SolveArbitrary, OptimalOnItsGrid) {
  test_support::InstanceGenerator gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const AuctionInstance inst = gen.next({3, 3, 4, 3, 3, 0.2});
    const ArbitraryResult r = solve_arbitrary(inst, 0.2);
    const auto bf = oracle::brute_force_arbitrary(inst, r.discretization.grid.levels.levels());
    EXPECT_NEAR(r.solution.objective, bf.value, 1e-9);
    EXPECT_NEAR(r.wup.value, r.solution.objective, 1e-9);
  }
}
