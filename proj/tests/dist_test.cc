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

#include "msdp/dist.h"

#include <gtest/gtest.h>

#include <cmath>

#include "msdp/rng.h"

namespace msdp {
namespace {

FiniteDist point(const Value& v) {
  return FiniteDist::point_mass(Domain::bits(), v);
}

// Seeded random distribution over a small domain, for property checks.
FiniteDist random_dist(const DomainPtr& dom, Rng& rng) {
  std::vector<Rat> w(dom->size());
  unsigned long total = 0;
  std::vector<unsigned long> raw(dom->size());
  for (std::size_t i = 0; i < dom->size(); ++i) {
    raw[i] = 1 + rng.next_u64() % 97;
    total += raw[i];
  }
  for (std::size_t i = 0; i < dom->size(); ++i) {
    w[i] = Rat(raw[i], total);
  }
  return FiniteDist(dom, std::move(w));
}

TEST(StatisticalDistance, IdentityIsZero) {
  FiniteDist p = FiniteDist::bernoulli(Rat(1, 3));
  EXPECT_EQ(statistical_distance(p, p), Rat(0));
}

TEST(StatisticalDistance, DisjointPointMassesAreAtDistanceOne) {
  EXPECT_EQ(statistical_distance(point(Value(0)), point(Value(1))), Rat(1));
}

TEST(StatisticalDistance, HalfL1ByHand) {
  // |1/2-3/4|/2 + |1/2-1/4|/2 = 1/4.
  EXPECT_EQ(statistical_distance(FiniteDist::bernoulli(Rat(1, 2)),
                                 FiniteDist::bernoulli(Rat(3, 4))),
            Rat(1, 4));
}

TEST(StatisticalDistance, RejectsDomainMismatch) {
  FiniteDist p = FiniteDist::uniform(Domain::ints(0, 2));
  FiniteDist q = FiniteDist::bernoulli(Rat(1, 2));
  EXPECT_THROW(statistical_distance(p, q), DomainMismatchError);
}

TEST(StatisticalDistance, TriangleInequalityOnRandomTriples) {
  Rng rng(7);
  DomainPtr dom = Domain::ints(0, 4);
  for (int rep = 0; rep < 50; ++rep) {
    FiniteDist a = random_dist(dom, rng);
    FiniteDist b = random_dist(dom, rng);
    FiniteDist c = random_dist(dom, rng);
    EXPECT_LE(statistical_distance(a, c),
              statistical_distance(a, b) + statistical_distance(b, c));
  }
}

TEST(CheckCloseness, IdentityHoldsAtZeroZero) {
  FiniteDist p = FiniteDist::bernoulli(Rat(2, 5));
  ClosenessReport r = check_closeness(p, p, Eps::zero(), Rat(0));
  EXPECT_TRUE(r.satisfied());
  EXPECT_EQ(r.delta_forward(), Rat(0));
}

TEST(CheckCloseness, RandomizedResponsePairHasZeroSlack) {
  // P(1) = e^eps/(1+e^eps), Q(1) = 1/(1+e^eps) at e^eps = 2.
  FiniteDist p = FiniteDist::bernoulli(Rat(2, 3));
  FiniteDist q = FiniteDist::bernoulli(Rat(1, 3));
  ClosenessReport r = check_closeness(p, q, Eps::from_factor(Rat(2)), Rat(0));
  EXPECT_TRUE(r.satisfied());
  EXPECT_EQ(r.delta_forward(), Rat(0));
  EXPECT_EQ(r.delta_backward(), Rat(0));
}

TEST(CheckCloseness, DisjointPointMassesViolateAtLargeEps) {
  ClosenessReport r = check_closeness(point(Value(0)), point(Value(1)),
                                      Eps::from_exponent(Rat(10)), Rat(0));
  EXPECT_EQ(r.verdict, Verdict::kViolated);
  EXPECT_EQ(r.delta_forward(), Rat(1));
}

TEST(CheckCloseness, MonotoneInEpsAndDelta) {
  Rng rng(11);
  DomainPtr dom = Domain::ints(0, 3);
  for (int rep = 0; rep < 25; ++rep) {
    FiniteDist p = random_dist(dom, rng);
    FiniteDist q = random_dist(dom, rng);
    Rat d(1, 100);
    bool prev = false;
    for (int f = 1; f <= 8; f *= 2) {
      bool now =
          check_closeness(p, q, Eps::from_factor(Rat(f)), d).satisfied();
      EXPECT_TRUE(!prev || now);  // once satisfied, stays satisfied
      prev = now;
    }
    ClosenessReport base = check_closeness(p, q, Eps::from_factor(Rat(2)), d);
    ClosenessReport more =
        check_closeness(p, q, Eps::from_factor(Rat(2)), Rat(1, 10));
    EXPECT_TRUE(!base.satisfied() || more.satisfied());
  }
}

TEST(CheckCloseness, PostProcessingNeverHurts) {
  Rng rng(13);
  DomainPtr dom = Domain::ints(0, 5);
  DomainPtr small = Domain::ints(0, 2);
  for (int rep = 0; rep < 40; ++rep) {
    FiniteDist p = random_dist(dom, rng);
    FiniteDist q = random_dist(dom, rng);
    // A random deterministic map into the smaller domain.
    std::vector<Value> img;
    for (std::size_t i = 0; i < dom->size(); ++i) {
      img.push_back(small->at(rng.next_u64() % small->size()));
    }
    auto f = [&](const Value& v) { return img[*dom->index_of(v)]; };
    auto [fp, fq] = align_union(p.map(f), q.map(f));
    Eps eps = Eps::from_factor(Rat(2));
    Rat delta(1, 50);
    ClosenessReport before = check_closeness(p, q, eps, delta);
    ClosenessReport after = check_closeness(fp, fq, eps, delta);
    EXPECT_LE(after.max_delta_upper(), before.max_delta_upper());
    if (before.satisfied()) EXPECT_TRUE(after.satisfied());
  }
}

TEST(MinimalFactor, ClosedFormMatchesBruteScan) {
  Rng rng(17);
  DomainPtr dom = Domain::ints(0, 3);
  for (int rep = 0; rep < 30; ++rep) {
    FiniteDist p = random_dist(dom, rng);
    FiniteDist q = random_dist(dom, rng);
    Rat delta(1, 25);
    auto opt = minimal_closeness_factor(p, q, delta);
    ASSERT_TRUE(opt.has_value());
    // Passing exactly at the optimum, failing just below it.
    EXPECT_TRUE(
        check_closeness(p, q, Eps::from_factor(*opt), delta).satisfied());
    if (*opt > 1) {
      Rat below = *opt * Rat(999999999, 1000000000);
      if (below < 1) below = 1;
      EXPECT_FALSE(
          check_closeness(p, q, Eps::from_factor(below), delta).satisfied());
    }
  }
}

TEST(MinimalFactor, InfiniteWhenDisjointMassExceedsDelta) {
  EXPECT_FALSE(
      minimal_closeness_factor(point(Value(0)), point(Value(1)), Rat(0))
          .has_value());
  EXPECT_TRUE(std::isinf(
      empirical_epsilon(point(Value(0)), point(Value(1)), Rat(0))));
}

TEST(MinimalFactor, RecoversRandomizedResponseEpsilon) {
  FiniteDist p = FiniteDist::bernoulli(Rat(2, 3));
  FiniteDist q = FiniteDist::bernoulli(Rat(1, 3));
  auto opt = minimal_closeness_factor(p, q, Rat(0));
  ASSERT_TRUE(opt.has_value());
  EXPECT_EQ(*opt, Rat(2));
  EXPECT_NEAR(empirical_epsilon(p, q, Rat(0)), std::log(2.0), 1e-9);
  EXPECT_EQ(*minimal_closeness_factor(p, p, Rat(0)), Rat(1));
}

TEST(JointDist, ConditionOnIndependentProductLeavesMarginal) {
  FiniteDist a = FiniteDist::bernoulli(Rat(1, 3));
  FiniteDist b = FiniteDist::bernoulli(Rat(1, 4));
  JointDist j = JointDist::product({a, b});
  JointDist cond = j.condition({{0, Value(1)}});
  EXPECT_EQ(cond.marginal_single(0), b);
}

TEST(JointDist, ConditionOnPerfectCorrelationIsPointMass) {
  DomainPtr bits = Domain::bits();
  JointDist j = JointDist::from_atoms(
      {bits, bits},
      {{{Value(0), Value(0)}, Rat(1, 2)}, {{Value(1), Value(1)}, Rat(1, 2)}});
  FiniteDist cond = j.condition({{0, Value(1)}}).marginal_single(0);
  EXPECT_EQ(cond.prob_of(Value(1)), Rat(1));
}

TEST(JointDist, SecretSharePairConditionsToThePlainInput) {
  // y1 uniform, y2 = x XOR y1, at x = 1: conditioning on y1 = 0 pins y2 = 1.
  DomainPtr bits = Domain::bits();
  JointDist j = JointDist::from_atoms(
      {bits, bits},
      {{{Value(0), Value(1)}, Rat(1, 2)}, {{Value(1), Value(0)}, Rat(1, 2)}});
  FiniteDist cond = j.condition({{0, Value(0)}}).marginal_single(0);
  EXPECT_EQ(cond.prob_of(Value(1)), Rat(1));
}

TEST(JointDist, ZeroMassConditionIsAHardError) {
  FiniteDist a = FiniteDist::bernoulli(Rat(0));
  FiniteDist b = FiniteDist::bernoulli(Rat(1, 2));
  JointDist j = JointDist::product({a, b});
  EXPECT_THROW(j.condition({{0, Value(1)}}), ZeroMassError);
}

TEST(JointDist, ConditionThenRemixReconstructsTheJoint) {
  Rng rng(23);
  DomainPtr bits = Domain::bits();
  DomainPtr three = Domain::ints(0, 2);
  // A correlated joint from random atoms.
  std::vector<std::pair<Value::List, Rat>> atoms;
  unsigned long total = 0;
  std::vector<unsigned long> raw;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 2; ++b) {
      raw.push_back(1 + rng.next_u64() % 13);
      total += raw.back();
    }
  }
  std::size_t idx = 0;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 2; ++b) {
      atoms.push_back({{Value(a), Value(b)}, Rat(raw[idx++], total)});
    }
  }
  JointDist j = JointDist::from_atoms({bits, three}, atoms);
  FiniteDist first = j.marginal_single(0);
  for (int a = 0; a <= 1; ++a) {
    JointDist cond = j.condition({{0, Value(a)}});
    for (int b = 0; b <= 2; ++b) {
      EXPECT_EQ(first.prob_of(Value(a)) * cond.prob_of({Value(b)}),
                j.prob_of({Value(a), Value(b)}));
    }
  }
}

TEST(Posterior, IdentityChannelGivesPointMass) {
  DomainPtr bits = Domain::bits();
  FiniteDist prior = FiniteDist::uniform(bits);
  auto channel = [&](const Value& x) {
    return FiniteDist::point_mass(bits, x);
  };
  FiniteDist post = posterior(prior, channel, Value(1));
  EXPECT_EQ(post.prob_of(Value(1)), Rat(1));
}

TEST(Posterior, RandomizedResponseByHand) {
  // Flip probability 1/3, observe 1: P(x=1 | y=1) = (2/3)/(2/3+1/3) = 2/3.
  FiniteDist prior = FiniteDist::uniform(Domain::bits());
  auto channel = [](const Value& x) {
    return FiniteDist::bernoulli(x.as_int() == 1 ? Rat(2, 3) : Rat(1, 3));
  };
  FiniteDist post = posterior(prior, channel, Value(1));
  EXPECT_EQ(post.prob_of(Value(1)), Rat(2, 3));
}

TEST(Posterior, ConstantChannelLeavesThePrior) {
  FiniteDist prior = FiniteDist::bernoulli(Rat(1, 5));
  auto channel = [](const Value&) { return FiniteDist::bernoulli(Rat(1, 2)); };
  EXPECT_EQ(posterior(prior, channel, Value(0)), prior);
}

TEST(Posterior, ZeroProbabilityObservationIsAnError) {
  FiniteDist prior = FiniteDist::uniform(Domain::bits());
  auto channel = [](const Value&) { return FiniteDist::bernoulli(Rat(0)); };
  EXPECT_THROW(posterior(prior, channel, Value(1)), ZeroMassError);
}

TEST(Posterior, AgreesWithConditioningTheConstructedJoint) {
  Rng rng(29);
  DomainPtr X = Domain::ints(0, 2);
  DomainPtr Y = Domain::ints(0, 3);
  for (int rep = 0; rep < 20; ++rep) {
    FiniteDist prior = random_dist(X, rng);
    std::vector<FiniteDist> rows;
    for (std::size_t i = 0; i < X->size(); ++i) {
      rows.push_back(random_dist(Y, rng));
    }
    auto channel = [&](const Value& x) { return rows[*X->index_of(x)]; };
    // Joint (x, y) built explicitly.
    std::vector<std::pair<Value::List, Rat>> atoms;
    for (std::size_t i = 0; i < X->size(); ++i) {
      for (std::size_t y = 0; y < Y->size(); ++y) {
        atoms.push_back({{X->at(i), Y->at(y)},
                         prior.weight(i) * rows[i].weight(y)});
      }
    }
    JointDist j = JointDist::from_atoms({X, Y}, atoms);
    for (std::size_t y = 0; y < Y->size(); ++y) {
      FiniteDist via_joint = j.condition({{1, Y->at(y)}}).marginal_single(0);
      FiniteDist via_bayes = posterior(prior, channel, Y->at(y));
      EXPECT_EQ(via_bayes, via_joint);
    }
  }
}

TEST(DistBuilder, RejectsNonUnitTotals) {
  DistBuilder b;
  b.add(Value(0), Rat(1, 2));
  EXPECT_THROW(b.build(), InternalError);
  EXPECT_EQ(b.build_normalized().prob_of(Value(0)), Rat(1));
}

TEST(Domain, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Domain::make({}), ConfigError);
  EXPECT_THROW(Domain::make({Value(1), Value(1)}), ConfigError);
}

}  // namespace
}  // namespace msdp
