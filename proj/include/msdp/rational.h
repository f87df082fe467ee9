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

#ifndef MSDP_RATIONAL_H_
#define MSDP_RATIONAL_H_

#include <gmpxx.h>

#include <string>

namespace msdp {

// Exact rational arithmetic is the default everywhere a privacy verdict
// depends on the result; doubles appear only on Monte-Carlo sampling paths.
using Rat = mpq_class;

// Parses "2/3", "-7", or decimal literals like "0.05" into an exact rational.
Rat rat_from_string(const std::string& text);

// Renders canonically: "2/3", or "2" when the denominator is one.
std::string rat_to_string(const Rat& r);

double rat_to_double(const Rat& r);

Rat rat_pow(const Rat& base, unsigned exponent);

Rat rat_abs(const Rat& r);

// Certified rational bounds on exp(x): the returned value is <= exp(x)
// (resp. >=) with relative gap below 2^-(prec_bits-8). Uses directed
// rounding end to end, so the bound is sound, not merely close.
Rat exp_lower_bound(const Rat& x, int prec_bits = 192);
Rat exp_upper_bound(const Rat& x, int prec_bits = 192);

// A privacy parameter epsilon, carried as exact rational bounds on e^eps.
// When epsilon is the logarithm of a rational (the usual choice for exact
// test scenarios) the bounds coincide and all downstream comparisons are
// exact. Otherwise the bounds bracket e^eps tightly enough that a verdict
// computed at the lower bound is conservative and one at the upper bound
// is sound for violation claims.
class Eps {
 public:
  // epsilon = ln(factor); factor must be >= 1.
  static Eps from_factor(const Rat& factor);
  // epsilon given as an exact rational exponent, e.g. 1 or 1/2.
  static Eps from_exponent(const Rat& epsilon, int prec_bits = 192);
  static Eps zero() { return from_factor(Rat(1)); }

  bool exact() const { return exact_; }
  const Rat& factor_lower() const { return lo_; }
  const Rat& factor_upper() const { return hi_; }

  // epsilon as a double, for display only.
  double value() const;

  // e^{k * eps}, with bounds powered accordingly.
  Eps pow(unsigned k) const;
  // e^{eps1 + eps2}.
  Eps times(const Eps& other) const;

  std::string describe() const;

 private:
  Eps(Rat lo, Rat hi, bool exact, double display);

  Rat lo_;
  Rat hi_;
  bool exact_;
  double display_;
};

}  // namespace msdp

#endif  // MSDP_RATIONAL_H_
