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

#include "msdp/rational.h"

#include <gtest/gtest.h>

#include <cmath>

#include "msdp/errors.h"

namespace msdp {
namespace {

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(rat_from_string("2/3"), Rat(2, 3));
  EXPECT_EQ(rat_from_string("-7"), Rat(-7));
  EXPECT_EQ(rat_from_string("0.05"), Rat(1, 20));
  EXPECT_EQ(rat_from_string(" 4/6 "), Rat(2, 3));
  EXPECT_THROW(rat_from_string("1/0"), ConfigError);
  EXPECT_THROW(rat_from_string("abc"), ConfigError);
}

TEST(Rational, FormatsCanonically) {
  EXPECT_EQ(rat_to_string(Rat(2, 3)), "2/3");
  EXPECT_EQ(rat_to_string(Rat(4)), "4");
  EXPECT_EQ(rat_to_string(Rat(-1, 2)), "-1/2");
}

TEST(Rational, PowIsExact) {
  EXPECT_EQ(rat_pow(Rat(2, 3), 3), Rat(8, 27));
  EXPECT_EQ(rat_pow(Rat(5), 0), Rat(1));
}

TEST(Rational, ExpBoundsBracketTightly) {
  Rat lo = exp_lower_bound(Rat(1));
  Rat hi = exp_upper_bound(Rat(1));
  EXPECT_LT(lo, hi);
  double e = std::exp(1.0);
  EXPECT_LT(rat_to_double(lo), e + 1e-15);
  EXPECT_GT(rat_to_double(hi), e - 1e-15);
  EXPECT_LT(rat_to_double(hi - lo), 1e-40);

  Rat nlo = exp_lower_bound(Rat(-2));
  Rat nhi = exp_upper_bound(Rat(-2));
  EXPECT_LT(nlo, nhi);
  EXPECT_GT(nlo, 0);
  EXPECT_NEAR(rat_to_double(nlo), std::exp(-2.0), 1e-12);
}

TEST(Eps, ExactFactorHasNoGap) {
  Eps e = Eps::from_factor(Rat(2));
  EXPECT_TRUE(e.exact());
  EXPECT_EQ(e.factor_lower(), Rat(2));
  EXPECT_EQ(e.factor_upper(), Rat(2));
  EXPECT_NEAR(e.value(), std::log(2.0), 1e-12);
}

TEST(Eps, PowAndTimesComposeFactors) {
  Eps e = Eps::from_factor(Rat(2));
  EXPECT_EQ(e.pow(7).factor_lower(), Rat(128));
  EXPECT_EQ(e.times(Eps::from_factor(Rat(3))).factor_lower(), Rat(6));
}

TEST(Eps, ExponentFormBracketsTheTruth) {
  Eps e = Eps::from_exponent(Rat(1));
  EXPECT_FALSE(e.exact());
  EXPECT_LT(e.factor_lower(), e.factor_upper());
  EXPECT_NEAR(rat_to_double(e.factor_lower()), std::exp(1.0), 1e-12);
  EXPECT_EQ(Eps::from_exponent(Rat(0)).factor_lower(), Rat(1));
  EXPECT_THROW(Eps::from_factor(Rat(1, 2)), ConfigError);
}

}  // namespace
}  // namespace msdp
