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

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <cstddef>

#include "msdp/errors.h"

namespace msdp {

namespace {

bool is_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
  std::string s = text;
  // Strip surrounding whitespace.
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw ConfigError("empty rational literal");
  s = s.substr(b, e - b + 1);

  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = (s[0] == '-');
    s = s.substr(1);
  }

  mpz_class num, den(1);
  std::size_t slash = s.find('/');
  std::size_t dot = s.find('.');
  if (slash != std::string::npos) {
    std::string ns = s.substr(0, slash);
    std::string ds = s.substr(slash + 1);
    if (!is_digits(ns) || !is_digits(ds)) {
      throw ConfigError("bad rational literal: " + text);
    }
    num = mpz_class(ns);
    den = mpz_class(ds);
    if (den == 0) throw ConfigError("zero denominator: " + text);
  } else if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!is_digits(whole) || (!frac.empty() && !is_digits(frac))) {
      throw ConfigError("bad rational literal: " + text);
    }
    num = mpz_class(whole);
    for (char c : frac) {
      num *= 10;
      num += (c - '0');
      den *= 10;
    }
  } else {
    if (!is_digits(s)) throw ConfigError("bad rational literal: " + text);
    num = mpz_class(s);
  }
  if (negative) num = -num;
  Rat r(num, den);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double rat_to_double(const Rat& r) { return r.get_d(); }

Rat rat_pow(const Rat& base, unsigned exponent) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

namespace {

Rat exp_directed(const Rat& x, bool upper, int prec_bits) {
  mpfr_t xf, rf;
  mpfr_init2(xf, prec_bits);
  mpfr_init2(rf, prec_bits);
  mpfr_set_q(xf, x.get_mpq_t(), upper ? MPFR_RNDU : MPFR_RNDD);
  mpfr_exp(rf, xf, upper ? MPFR_RNDU : MPFR_RNDD);
  mpq_t q;
  mpq_init(q);
  mpfr_get_q(q, rf);
  Rat out{mpq_class(q)};
  mpq_clear(q);
  mpfr_clear(xf);
  mpfr_clear(rf);
  return out;
}

}  // namespace

Rat exp_lower_bound(const Rat& x, int prec_bits) {
  return exp_directed(x, /*upper=*/false, prec_bits);
}

Rat exp_upper_bound(const Rat& x, int prec_bits) {
  return exp_directed(x, /*upper=*/true, prec_bits);
}

Eps::Eps(Rat lo, Rat hi, bool exact, double display)
    : lo_(std::move(lo)), hi_(std::move(hi)), exact_(exact), display_(display) {}

Eps Eps::from_factor(const Rat& factor) {
  if (factor < 1) {
    throw ConfigError("e^eps factor must be >= 1, got " +
                      rat_to_string(factor));
  }
  return Eps(factor, factor, /*exact=*/true,
             std::log(rat_to_double(factor)));
}

Eps Eps::from_exponent(const Rat& epsilon, int prec_bits) {
  if (epsilon < 0) {
    throw ConfigError("epsilon must be >= 0, got " + rat_to_string(epsilon));
  }
  if (epsilon == 0) return from_factor(Rat(1));
  return Eps(exp_lower_bound(epsilon, prec_bits),
             exp_upper_bound(epsilon, prec_bits),
             /*exact=*/false, rat_to_double(epsilon));
}

double Eps::value() const { return display_; }

Eps Eps::pow(unsigned k) const {
  return Eps(rat_pow(lo_, k), rat_pow(hi_, k), exact_, display_ * k);
}

Eps Eps::times(const Eps& other) const {
  return Eps(lo_ * other.lo_, hi_ * other.hi_, exact_ && other.exact_,
             display_ + other.display_);
}

std::string Eps::describe() const {
  if (exact_) return "ln(" + rat_to_string(lo_) + ")";
  return "~" + std::to_string(display_);
}

}  // namespace msdp
