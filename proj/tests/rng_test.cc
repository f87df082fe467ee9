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

#include "msdp/rng.h"

#include <gtest/gtest.h>

namespace msdp {
namespace {

TEST(Rng, PointMassAlwaysDrawsTheAtom) {
  FiniteDist d = FiniteDist::point_mass(Domain::bits(), Value(1));
  Rng rng(5);
  Sampler s(d);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(s.draw(rng), Value(1));
}

TEST(Rng, BernoulliMeanWithinThreeSigma) {
  FiniteDist d = FiniteDist::bernoulli(Rat(1, 2));
  Rng rng(42);
  Sampler s(d);
  long ones = 0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) ones += s.draw(rng).as_int();
  double mean = static_cast<double>(ones) / trials;
  EXPECT_NEAR(mean, 0.5, 0.01);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(123), b(123);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  FiniteDist d = FiniteDist::uniform(Domain::ints(0, 9));
  Rng c(9), e(9);
  Sampler s(d);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(s.draw(c), s.draw(e));
}

TEST(Rng, SplitStreamsAreIndependentOfDrawOrder) {
  Rng root(77);
  Rng a = root.split(1);
  root.next_u64();
  Rng b = Rng(77).split(1);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  // Different labels give different streams.
  EXPECT_NE(Rng(77).split(1).next_u64(), Rng(77).split(2).next_u64());
}

}  // namespace
}  // namespace msdp
