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

#include "msdp/protocol.h"

#include <gtest/gtest.h>

#include "msdp/auditor.h"
#include "msdp/counting.h"

namespace msdp {
namespace {

constexpr std::size_t kCeiling = 10'000'000;

Randomizer identity_randomizer() {
  DomainPtr bits = Domain::bits();
  std::vector<JointDist> channel;
  for (int x = 0; x <= 1; ++x) {
    channel.push_back(JointDist::from_atoms(
        {bits, bits}, {{{Value(x), Value(x)}, Rat(1)}}));
  }
  return Randomizer(bits, std::move(channel));
}

Protocol pass_through_protocol() {
  Protocol p;
  p.n = 1;
  p.dag.k = 2;
  p.dag.edges = {{0, 1}};
  p.randomizers = {identity_randomizer()};
  LinearServerSpec pick_z;
  pick_z.user_sign = 0;
  pick_z.server_sign = 1;
  p.servers = {forward_server(), linear_server(pick_z)};
  return p;
}

Protocol rr_two_server(int n) {
  Protocol p;
  p.n = n;
  p.dag.k = 2;
  p.dag.edges = {{0, 1}};
  p.randomizers.assign(n, rr_pair_randomizer(Rat(1, 3)));
  p.servers = {forward_server(), linear_server(LinearServerSpec{})};
  return p;
}

TEST(Execute, PassThroughForwardsTheInput) {
  Protocol p = pass_through_protocol();
  Rng rng(3);
  for (int x = 0; x <= 1; ++x) {
    Transcript t = execute(p, {Value(x)}, rng);
    EXPECT_EQ(t.z_out, Value(x));
    EXPECT_EQ(t.user_messages[0][0], Value(x));
    EXPECT_EQ(t.user_messages[0][1], Value(x));
  }
}

TEST(Execute, SameSeedSameTranscript) {
  CountingParams params;
  params.n = 2;
  params.t = 4;
  params.noise_eps = Eps::from_factor(Rat(2));
  params.epsilon = Rat(1);
  params.delta = Rat(1, 100);
  Protocol p = counting_protocol(params);
  Rng a(99), b(99);
  Transcript ta = execute(p, {Value(1), Value(0)}, a);
  Transcript tb = execute(p, {Value(1), Value(0)}, b);
  EXPECT_EQ(ta.z_out, tb.z_out);
  EXPECT_EQ(ta.server_messages[0], tb.server_messages[0]);
  EXPECT_EQ(ta.user_messages, tb.user_messages);
}

TEST(Execute, TinyCountingPipelineMatchesTheShareDecomposition) {
  // Exact enumeration of the share-splitting pipeline at t=4. The honest
  // shares cancel exactly, so E[z_out] = sum(x) + (E[a1+a2] - t); the noise
  // mean sits t*pmf(t) above t/2 because the support {1..t} has no mirror
  // atom for v = t.
  CountingParams params;
  params.n = 2;
  params.t = 4;
  params.noise_eps = Eps::from_factor(Rat(2));
  params.epsilon = Rat(1);
  params.delta = Rat(1, 100);
  Protocol p = counting_protocol(params);
  FiniteDist out = output_distribution(p, {Value(1), Value(0)}, kCeiling);
  FiniteDist noise = dt_pmf(params.t, params.noise_eps);
  Rat expected = Rat(1) + 2 * noise.expectation_int() - params.t;
  EXPECT_EQ(out.expectation_int(), expected);
  EXPECT_EQ(expected, Rat(13, 9));  // bias is exactly t * pmf(t) = 4/9
}

TEST(Marginal, FullSubsetIsTheOriginalChannel) {
  Randomizer r = rr_pair_randomizer(Rat(1, 3));
  Randomizer full = r.marginal({0, 1});
  for (int x = 0; x <= 1; ++x) {
    EXPECT_EQ(full.channel(Value(x)).as_tuple_dist(),
              r.channel(Value(x)).as_tuple_dist());
  }
}

TEST(Marginal, ShareCoordinateAloneIsUniform) {
  Randomizer r = xor_share_randomizer(Rat(1, 2));
  Randomizer first = r.marginal({0});
  for (int x = 0; x <= 1; ++x) {
    FiniteDist d = first.channel(Value(x)).marginal_single(0);
    EXPECT_EQ(d.prob_of(Value(0)), Rat(1, 2));
    EXPECT_EQ(d.prob_of(Value(1)), Rat(1, 2));
  }
}

TEST(Marginal, IndependentProductFactorIsTheFactor) {
  Randomizer r = rr_pair_randomizer(Rat(1, 3));
  Randomizer second = r.marginal({1});
  EXPECT_EQ(second.channel(Value(1)).marginal_single(0),
            FiniteDist::bernoulli(Rat(2, 3)));
  EXPECT_THROW(r.marginal({}), ConfigError);
}

TEST(ViewSpec, NoCorruptionLeavesOnlyTheOutput) {
  Protocol p = rr_two_server(1);
  ViewSpec spec = ViewSpec::make(p, Attack{});
  EXPECT_TRUE(spec.visible_edges.empty());
  EXPECT_TRUE(spec.visible_user_msgs.empty());
  EXPECT_TRUE(spec.corrupt_users.empty());
  // The view distribution is exactly the output distribution, re-labelled.
  FiniteDist view = view_distribution(p, Attack{}, {Value(1)}, kCeiling);
  FiniteDist out = output_distribution(p, {Value(1)}, kCeiling);
  FiniteDist unwrapped =
      view.map([](const Value& v) { return v.as_list()[0]; });
  EXPECT_EQ(unwrapped, out);
}

TEST(ViewSpec, CorruptFirstServerSeesItsMessagesButNotTheOthers) {
  Protocol p = rr_two_server(1);
  Attack a;
  a.corrupt_servers = {0};
  ViewSpec spec = ViewSpec::make(p, a);
  // Edge (1,2) touches the corrupt server; y_{1,1} visible, y_{1,2} not.
  EXPECT_EQ(spec.visible_edges, (std::vector<int>{0}));
  EXPECT_EQ(spec.visible_user_msgs,
            (std::vector<std::pair<int, int>>{{0, 0}}));
}

TEST(ViewSpec, AllUsersCorruptRevealsEverything) {
  Protocol p = rr_two_server(2);
  Attack a;
  a.corrupt_users = {0, 1};
  ViewSpec spec = ViewSpec::make(p, a);
  EXPECT_EQ(spec.visible_user_msgs.size(), 4u);  // every (i, j)
  EXPECT_EQ(spec.corrupt_users.size(), 2u);
}

TEST(ViewSpec, HonestToHonestMessagesNeverAppear) {
  Protocol p = rr_two_server(2);
  for (std::uint64_t um = 0; um < 4; ++um) {
    for (std::uint64_t sm = 0; sm < 4; ++sm) {
      Attack a;
      for (int i = 0; i < 2; ++i) {
        if (um & (1u << i)) a.corrupt_users.push_back(i);
      }
      for (int j = 0; j < 2; ++j) {
        if (sm & (1u << j)) a.corrupt_servers.push_back(j);
      }
      ViewSpec spec = ViewSpec::make(p, a);
      for (const auto& [i, j] : spec.visible_user_msgs) {
        bool user_honest = !(um & (1u << i));
        bool server_honest = !(sm & (1u << j));
        EXPECT_FALSE(user_honest && server_honest);
      }
    }
  }
}

TEST(ViewDistribution, PermutingHonestInputsLeavesOutputViewUnchanged) {
  Protocol p = rr_two_server(2);
  FiniteDist a = view_distribution(p, Attack{}, {Value(0), Value(1)}, kCeiling);
  FiniteDist b = view_distribution(p, Attack{}, {Value(1), Value(0)}, kCeiling);
  EXPECT_EQ(a, b);
}

TEST(ViewDistribution, CeilingIsEnforced) {
  Protocol p = rr_two_server(2);
  EXPECT_THROW(view_distribution(p, Attack{}, {Value(0), Value(1)}, 3),
               SizeCeilingError);
}

TEST(ViewDistribution, MonteCarloFrequenciesMatchEnumeration) {
  Protocol p = rr_two_server(1);
  Attack a;
  a.corrupt_servers = {0};
  Value::List x = {Value(1)};
  FiniteDist exact = view_distribution(p, a, x, kCeiling);
  ViewSpec spec = ViewSpec::make(p, a);
  Rng rng(20260810);
  const long trials = 100000;
  std::unordered_map<Value, long, ValueHash> counts;
  for (long i = 0; i < trials; ++i) {
    Transcript t = execute(p, x, rng);
    ++counts[spec.project(t, x)];
  }
  double chi2 = 0;
  int dof = -1;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    double expected = rat_to_double(exact.weight(i)) * trials;
    if (expected < 5) continue;
    auto it = counts.find(exact.domain()->at(i));
    double observed = it == counts.end() ? 0.0 : it->second;
    chi2 += (observed - expected) * (observed - expected) / expected;
    ++dof;
  }
  ASSERT_GT(dof, 0);
  EXPECT_GE(chi_square_pvalue(chi2, dof), 0.001);
}

TEST(CheckProtocolDp, ClearTextIsMaximallyViolated) {
  Protocol p;
  p.n = 1;
  p.dag.k = 2;
  p.dag.edges = {{0, 1}};
  p.randomizers = {cleartext_randomizer()};
  p.servers = {forward_server(), constant_server(Value(0))};
  ProtocolDpReport r = check_protocol_dp(p, 1, Eps::from_exponent(Rat(10)),
                                         Rat(0), kCeiling);
  EXPECT_EQ(r.verdict, Verdict::kViolated);
  EXPECT_EQ(r.worst.report.max_delta_upper(), Rat(1));
}

TEST(CheckProtocolDp, ConstantOutputSatisfiedAtZeroWithNoCorruptServers) {
  Protocol p = rr_two_server(2);
  p.servers[1] = constant_server(Value(7));
  ProtocolDpReport r =
      check_protocol_dp(p, 0, Eps::zero(), Rat(0), kCeiling);
  EXPECT_EQ(r.verdict, Verdict::kSatisfied);
}

TEST(CheckProtocolDp, RandomizedResponsePairIsExactlyFourToOne) {
  Protocol p = rr_two_server(1);
  // Worst ratio is exactly e^{2 ln 2} = 4: satisfied there, violated just
  // below.
  ProtocolDpReport at4 =
      check_protocol_dp(p, 1, Eps::from_factor(Rat(4)), Rat(0), kCeiling);
  EXPECT_EQ(at4.verdict, Verdict::kSatisfied);
  EXPECT_EQ(at4.worst.report.max_delta_upper(), Rat(0));
  ProtocolDpReport below =
      check_protocol_dp(p, 1, Eps::from_factor(Rat(399, 100)), Rat(0),
                        kCeiling);
  EXPECT_EQ(below.verdict, Verdict::kViolated);
}

TEST(Dag, ValidationCatchesBackwardEdges) {
  CommDag dag;
  dag.k = 3;
  dag.edges = {{2, 1}};
  try {
    dag.validate();
    FAIL() << "expected rejection";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("(3,2)"), std::string::npos);
  }
}

TEST(Protocol, AlphabetMismatchIsRejected) {
  Protocol p = rr_two_server(1);
  p.dag.k = 3;  // randomizer arity no longer matches
  p.dag.edges = {{0, 1}, {1, 2}};
  p.servers.push_back(forward_server());
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace msdp
