// Copyright 2026 The MSDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msdp/purify.h"

#include <gtest/gtest.h>

namespace msdp {
namespace {

TEST(SolveLp, FindsAKnownOptimum) {
  // min -x - y  s.t.  x + y <= 3, x <= 2, y <= 2  =>  optimum -3 at e.g.
  // (2, 1).
  LinearProgram lp;
  lp.num_vars = 2;
  lp.rows = {{Rat(1), Rat(1)}, {Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  lp.rhs = {Rat(3), Rat(2), Rat(2)};
  lp.is_equality = {false, false, false};
  lp.objective = {Rat(-1), Rat(-1)};
  LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.feasible);
  EXPECT_EQ(sol.objective, Rat(-3));
  EXPECT_EQ(sol.x[0] + sol.x[1], Rat(3));
}

TEST(SolveLp, HandlesEqualitiesAndNegativeRhs) {
  // x - y = -1, x + y <= 5, min x  =>  x = 0, y = 1.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.rows = {{Rat(1), Rat(-1)}, {Rat(1), Rat(1)}};
  lp.rhs = {Rat(-1), Rat(5)};
  lp.is_equality = {true, false};
  lp.objective = {Rat(1), Rat(0)};
  LpSolution sol = solve_lp(lp);
  ASSERT_TRUE(sol.feasible);
  EXPECT_EQ(sol.x[0], Rat(0));
  EXPECT_EQ(sol.x[1], Rat(1));
}

TEST(SolveLp, DetectsInfeasibility) {
  // x <= 1 and x = 2.
  LinearProgram lp;
  lp.num_vars = 1;
  lp.rows = {{Rat(1)}, {Rat(1)}};
  lp.rhs = {Rat(1), Rat(2)};
  lp.is_equality = {false, true};
  lp.objective = {Rat(0)};
  EXPECT_FALSE(solve_lp(lp).feasible);
}

std::vector<FiniteDist> rr_channel(const Rat& flip) {
  return {FiniteDist::bernoulli(flip), FiniteDist::bernoulli(Rat(1) - flip)};
}

TEST(PureDpRatio, MeasuresTheWorstPointwiseRatio) {
  auto channel = rr_channel(Rat(1, 3));
  auto rho = pure_dp_ratio(channel);
  ASSERT_TRUE(rho.has_value());
  EXPECT_EQ(*rho, Rat(2));
  // Disjoint support has no finite ratio.
  DomainPtr bits = Domain::bits();
  std::vector<FiniteDist> identity = {
      FiniteDist::point_mass(bits, Value(0)),
      FiniteDist::point_mass(bits, Value(1))};
  EXPECT_FALSE(pure_dp_ratio(identity).has_value());
}

TEST(Purify, PureChannelIsReturnedUnchanged) {
  DomainPtr bits = Domain::bits();
  auto channel = rr_channel(Rat(1, 3));  // ratio 2 = e^{ln 2}
  PurifiedChannel pc = purify(bits, channel, Eps::from_factor(Rat(2)), Rat(0));
  EXPECT_FALSE(pc.changed);
  EXPECT_EQ(pc.table[0], channel[0]);
  EXPECT_EQ(pc.distance_to_original[0], Rat(0));
  EXPECT_EQ(pc.ratio_bound, Rat(2));
}

TEST(Purify, ConstantChannelIsReturnedUnchanged) {
  DomainPtr bits = Domain::bits();
  std::vector<FiniteDist> channel = {FiniteDist::bernoulli(Rat(2, 5)),
                                     FiniteDist::bernoulli(Rat(2, 5))};
  PurifiedChannel pc = purify(bits, channel, Eps::zero(), Rat(0));
  EXPECT_FALSE(pc.changed);
}

TEST(Purify, LeakyChannelBecomesPureWithinDelta) {
  // Randomized response with a delta-mass leak symbol emitted only for
  // x = 1: (ln 2, 1/20)-private but not pure.
  DomainPtr bits = Domain::bits();
  DomainPtr out = Domain::make({Value(0), Value(1), Value("leak")});
  Rat d(1, 20);
  std::vector<FiniteDist> channel = {
      FiniteDist(out, {Rat(2, 3), Rat(1, 3), Rat(0)}),
      FiniteDist(out, {Rat(1, 3) - d / 2, Rat(2, 3) - d / 2, d})};
  // Sanity: the input really is (ln 2, d)-close.
  ClosenessReport pre = check_closeness(channel[0], channel[1],
                                        Eps::from_factor(Rat(2)), d);
  ASSERT_TRUE(pre.satisfied());
  ASSERT_FALSE(pure_dp_ratio(channel).has_value());

  PurifiedChannel pc = purify(bits, channel, Eps::from_factor(Rat(2)), d);
  EXPECT_TRUE(pc.changed);
  // Pure at 2 eps: every pairwise comparison passes with zero delta.
  ClosenessReport post = check_closeness(pc.table[0], pc.table[1],
                                         Eps::from_factor(Rat(4)), Rat(0));
  EXPECT_TRUE(post.satisfied());
  EXPECT_LE(pc.ratio_bound, Rat(4));
  for (std::size_t x = 0; x < 2; ++x) {
    EXPECT_LE(statistical_distance(pc.table[x], channel[x]), d);
    EXPECT_LE(pc.distance_to_original[x], d);
  }
}

TEST(Purify, ThreeInputAlphabetStaysFeasible) {
  DomainPtr dom = Domain::ints(0, 2);
  DomainPtr out = Domain::ints(0, 3);
  Rat d(1, 10);
  std::vector<FiniteDist> channel = {
      FiniteDist(out, {Rat(1, 2), Rat(1, 4), Rat(1, 4), Rat(0)}),
      FiniteDist(out, {Rat(1, 4), Rat(1, 2), Rat(1, 8), Rat(1, 8)}),
      FiniteDist(out, {Rat(1, 4), Rat(1, 4), Rat(1, 2), Rat(0)})};
  PurifiedChannel pc = purify(dom, channel, Eps::from_factor(Rat(2)), d);
  EXPECT_TRUE(pc.changed);
  EXPECT_LE(pc.ratio_bound, Rat(4));
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_LE(pc.distance_to_original[x], d);
  }
}

TEST(Purify, InfeasibleClaimIsAnInternalError) {
  // Disjoint deterministic channel cannot be made pure within delta = 1/100.
  DomainPtr bits = Domain::bits();
  std::vector<FiniteDist> identity = {
      FiniteDist::point_mass(bits, Value(0)),
      FiniteDist::point_mass(bits, Value(1))};
  EXPECT_THROW(purify(bits, identity, Eps::from_factor(Rat(2)), Rat(1, 100)),
               InternalError);
}

}  // namespace
}  // namespace msdp
