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

#include "msdp/online.h"

#include <gtest/gtest.h>

namespace msdp {
namespace {

constexpr std::size_t kCeiling = 1'000'000;

FiniteDist point_state(const Value& v) {
  DistBuilder b;
  b.add(v, Rat(1));
  return b.build();
}

// Deterministic running-sum counter over bits.
OnlineAlgorithm counter(int m) {
  return OnlineAlgorithm(
      m, Domain::bits(), [] { return point_state(Value(0)); },
      [](int, const Value& s, const Value& x) {
        return point_state(Value(s.as_int() + x.as_int()));
      },
      [](const Value& s) { return point_state(s); });
}

// Remembers the most recent input verbatim.
OnlineAlgorithm last_input(int m, DomainPtr dom) {
  return OnlineAlgorithm(
      m, dom, [] { return point_state(Value("start")); },
      [](int, const Value&, const Value& x) { return point_state(x); },
      [](const Value& s) { return point_state(s); });
}

// State = randomized response of the latest input at e^eps = 2.
OnlineAlgorithm rr_state(int m) {
  return OnlineAlgorithm(
      m, Domain::bits(), [] { return point_state(Value(0)); },
      [](int, const Value&, const Value& x) {
        return FiniteDist::bernoulli(x.as_int() == 1 ? Rat(2, 3) : Rat(1, 3));
      },
      [](const Value& s) { return point_state(s); });
}

TEST(RunOnline, CounterFoldsTheStream) {
  Rng rng(1);
  OnlineRun run = run_online(counter(3), {Value(1), Value(0), Value(1)}, rng);
  EXPECT_EQ(run.output, Value(2));
  EXPECT_EQ(run.snapshots.size(), 4u);  // S_0 .. S_3
  EXPECT_EQ(run.snapshots[2], Value(1));
}

TEST(RunOnline, SnapshotTracksTheLastInput) {
  DomainPtr abc = Domain::make({Value("a"), Value("b"), Value("c")});
  Rng rng(2);
  OnlineRun run =
      run_online(last_input(3, abc), {Value("a"), Value("b"), Value("c")}, rng);
  EXPECT_EQ(run.snapshots[2], Value("b"));
}

TEST(RunOnline, SameSeedSameTrace) {
  Rng a(33), b(33);
  OnlineRun ra = run_online(rr_state(4), {Value(1), Value(0), Value(1), Value(1)}, a);
  OnlineRun rb = run_online(rr_state(4), {Value(1), Value(0), Value(1), Value(1)}, b);
  EXPECT_EQ(ra.snapshots, rb.snapshots);
  EXPECT_EQ(ra.output, rb.output);
}

TEST(RunOnline, RejectsWrongStreamLength) {
  Rng rng(3);
  EXPECT_THROW(run_online(counter(3), {Value(1)}, rng), ConfigError);
}

TEST(StateDistribution, DeterministicAlgorithmGivesPointMass) {
  FiniteDist d = state_distribution(counter(3), {Value(1), Value(1), Value(0)},
                                    3, kCeiling);
  EXPECT_EQ(d.prob_of(Value(2)), Rat(1));
}

TEST(StateDistribution, RandomizedResponseStateByHand) {
  FiniteDist d = state_distribution(rr_state(1), {Value(1)}, 1, kCeiling);
  EXPECT_EQ(d.prob_of(Value(1)), Rat(2, 3));
  EXPECT_EQ(d.prob_of(Value(0)), Rat(1, 3));
}

TEST(StateDistribution, TimeZeroIsTheInitDistribution) {
  FiniteDist d = state_distribution(rr_state(2), {Value(1), Value(0)}, 0,
                                    kCeiling);
  EXPECT_EQ(d.prob_of(Value(0)), Rat(1));
}

TEST(StateDistribution, ComposedWithOutMatchesTheOutputDistribution) {
  // Out = state + fresh bernoulli; check out(S_m) against a direct fold.
  OnlineAlgorithm alg(
      2, Domain::bits(), [] { return point_state(Value(0)); },
      [](int, const Value& s, const Value& x) {
        return FiniteDist::bernoulli(x.as_int() == 1 ? Rat(3, 4) : Rat(1, 4));
      },
      [](const Value& s) {
        DistBuilder b;
        b.add(Value(s.as_int()), Rat(1, 3));
        b.add(Value(s.as_int() + 10), Rat(2, 3));
        return b.build();
      });
  Value::List stream = {Value(1), Value(0)};
  FiniteDist out = online_output_distribution(alg, stream, kCeiling);
  // Direct: S_2 ~ Bernoulli(1/4); out adds 10 with prob 2/3.
  EXPECT_EQ(out.prob_of(Value(1)), Rat(1, 4) * Rat(1, 3));
  EXPECT_EQ(out.prob_of(Value(11)), Rat(1, 4) * Rat(2, 3));
  EXPECT_EQ(out.prob_of(Value(0)), Rat(3, 4) * Rat(1, 3));
  EXPECT_EQ(out.prob_of(Value(10)), Rat(3, 4) * Rat(2, 3));
}

TEST(InternalPrivacy, VerbatimStateIsViolated) {
  InternalPrivacyOptions opts;
  opts.ceiling = kCeiling;
  InternalPrivacyReport r = check_internal_privacy(
      last_input(2, Domain::bits()), Eps::from_factor(Rat(1000)), Rat(1, 2),
      opts);
  EXPECT_EQ(r.verdict, Verdict::kViolated);
}

TEST(InternalPrivacy, PerStepRandomizedResponseHoldsAtItsEpsilon) {
  InternalPrivacyOptions opts;
  opts.ceiling = kCeiling;
  InternalPrivacyReport r = check_internal_privacy(
      rr_state(3), Eps::from_factor(Rat(2)), Rat(0), opts);
  EXPECT_EQ(r.verdict, Verdict::kSatisfied);
  // And it is tight: just below factor 2 it breaks.
  InternalPrivacyReport tight = check_internal_privacy(
      rr_state(3), Eps::from_factor(Rat(199, 100)), Rat(0), opts);
  EXPECT_EQ(tight.verdict, Verdict::kViolated);
}

TEST(InternalPrivacy, ConstantStateSatisfiedAtZero) {
  OnlineAlgorithm alg(
      3, Domain::bits(), [] { return point_state(Value("s")); },
      [](int, const Value& s, const Value&) { return point_state(s); },
      [](const Value& s) { return point_state(s); });
  InternalPrivacyOptions opts;
  opts.ceiling = kCeiling;
  InternalPrivacyReport r =
      check_internal_privacy(alg, Eps::zero(), Rat(0), opts);
  EXPECT_EQ(r.verdict, Verdict::kSatisfied);
}

TEST(InternalPrivacy, DifferingIndexFilterRestrictsCells) {
  InternalPrivacyOptions opts;
  opts.ceiling = kCeiling;
  opts.include_output_at_end = false;
  InternalPrivacyReport all =
      check_internal_privacy(rr_state(3), Eps::from_factor(Rat(2)), Rat(0),
                             opts);
  opts.max_differing_index = 1;
  InternalPrivacyReport first =
      check_internal_privacy(rr_state(3), Eps::from_factor(Rat(2)), Rat(0),
                             opts);
  EXPECT_LT(first.cells, all.cells);
  EXPECT_EQ(first.verdict, Verdict::kSatisfied);
}

}  // namespace
}  // namespace msdp
