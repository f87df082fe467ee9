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

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdp {

namespace {
constexpr std::size_t kWitnessCap = 256;
}  // namespace

Domain::Domain(std::vector<Value> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ConfigError("domain must be non-empty");
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    auto [it, inserted] = index_.emplace(elements_[i], i);
    if (!inserted) {
      throw ConfigError("duplicate domain element: " +
                        elements_[i].to_string());
    }
  }
}

std::shared_ptr<const Domain> Domain::make(std::vector<Value> elements) {
  return std::make_shared<const Domain>(std::move(elements));
}

std::shared_ptr<const Domain> Domain::ints(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ConfigError("empty integer domain");
  std::vector<Value> elems;
  elems.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t v = lo; v <= hi; ++v) elems.emplace_back(v);
  return make(std::move(elems));
}

std::shared_ptr<const Domain> Domain::bits() { return ints(0, 1); }

std::optional<std::size_t> Domain::index_of(const Value& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Domain::operator==(const Domain& other) const {
  if (this == &other) return true;
  return elements_ == other.elements_;
}

bool same_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

FiniteDist::FiniteDist(DomainPtr domain, std::vector<Rat> weights)
    : domain_(std::move(domain)), weights_(std::move(weights)) {
  if (!domain_) throw ConfigError("distribution needs a domain");
  if (weights_.size() != domain_->size()) {
    throw ConfigError("weight count does not match domain size");
  }
  Rat total(0);
  for (const Rat& w : weights_) {
    if (w < 0) throw ConfigError("negative probability weight");
    total += w;
  }
  if (total != 1) {
    throw ConfigError("weights sum to " + rat_to_string(total) + ", not 1");
  }
}

FiniteDist FiniteDist::point_mass(DomainPtr domain, const Value& v) {
  auto idx = domain->index_of(v);
  if (!idx) {
    throw DomainMismatchError("point mass value " + v.to_string() +
                              " not in domain");
  }
  std::vector<Rat> w(domain->size(), Rat(0));
  w[*idx] = 1;
  return FiniteDist(std::move(domain), std::move(w));
}

FiniteDist FiniteDist::uniform(DomainPtr domain) {
  std::size_t n = domain->size();
  std::vector<Rat> w(n, Rat(1, static_cast<unsigned long>(n)));
  return FiniteDist(std::move(domain), std::move(w));
}

FiniteDist FiniteDist::bernoulli(const Rat& p_one) {
  if (p_one < 0 || p_one > 1) throw ConfigError("bernoulli parameter outside [0,1]");
  return FiniteDist(Domain::bits(), {Rat(1) - p_one, p_one});
}

Rat FiniteDist::prob_of(const Value& v) const {
  auto idx = domain_->index_of(v);
  if (!idx) return Rat(0);
  return weights_[*idx];
}

std::size_t FiniteDist::support_size() const {
  std::size_t n = 0;
  for (const Rat& w : weights_) {
    if (w > 0) ++n;
  }
  return n;
}

FiniteDist FiniteDist::map(
    const std::function<Value(const Value&)>& f) const {
  DistBuilder b;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0) b.add(f(domain_->at(i)), weights_[i]);
  }
  return b.build();
}

Rat FiniteDist::expectation_int() const {
  Rat e(0);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] > 0) {
      e += weights_[i] * Rat(static_cast<long>(domain_->at(i).as_int()));
    }
  }
  return e;
}

bool FiniteDist::operator==(const FiniteDist& other) const {
  if (same_domain(domain_, other.domain_)) return weights_ == other.weights_;
  auto [a, b] = align_union(*this, other);
  return a.weights() == b.weights();
}

void DistBuilder::add(const Value& v, const Rat& mass) {
  if (mass < 0) throw ConfigError("negative mass");
  if (mass == 0) return;
  auto [it, inserted] = mass_.emplace(v, mass);
  if (!inserted) it->second += mass;
}

void DistBuilder::add_scaled(const FiniteDist& d, const Rat& factor) {
  if (factor == 0) return;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.weight(i) > 0) add(d.domain()->at(i), d.weight(i) * factor);
  }
}

Rat DistBuilder::total() const {
  Rat t(0);
  for (const auto& [v, w] : mass_) t += w;
  return t;
}

FiniteDist DistBuilder::build_with_total(const Rat& denom) const {
  std::vector<Value> elems;
  elems.reserve(mass_.size());
  for (const auto& [v, w] : mass_) elems.push_back(v);
  std::sort(elems.begin(), elems.end());
  std::vector<Rat> weights;
  weights.reserve(elems.size());
  for (const Value& v : elems) weights.push_back(mass_.at(v) / denom);
  return FiniteDist(Domain::make(std::move(elems)), std::move(weights));
}

FiniteDist DistBuilder::build() const {
  Rat t = total();
  if (t != 1) {
    throw InternalError("enumeration mass sums to " + rat_to_string(t) +
                        ", expected exactly 1");
  }
  return build_with_total(Rat(1));
}

FiniteDist DistBuilder::build_normalized() const {
  Rat t = total();
  if (t == 0) throw ZeroMassError("conditioning on a zero-probability event");
  return build_with_total(t);
}

std::pair<FiniteDist, FiniteDist> align_union(const FiniteDist& p,
                                              const FiniteDist& q) {
  if (same_domain(p.domain(), q.domain())) return {p, q};
  std::vector<Value> elems;
  for (const Value& v : p.domain()->elements()) elems.push_back(v);
  for (const Value& v : q.domain()->elements()) {
    if (!p.domain()->index_of(v)) elems.push_back(v);
  }
  std::sort(elems.begin(), elems.end());
  DomainPtr dom = Domain::make(std::move(elems));
  std::vector<Rat> pw(dom->size(), Rat(0)), qw(dom->size(), Rat(0));
  for (std::size_t i = 0; i < dom->size(); ++i) {
    pw[i] = p.prob_of(dom->at(i));
    qw[i] = q.prob_of(dom->at(i));
  }
  return {FiniteDist(dom, std::move(pw)), FiniteDist(dom, std::move(qw))};
}

Rat statistical_distance(const FiniteDist& p, const FiniteDist& q) {
  if (!same_domain(p.domain(), q.domain())) {
    throw DomainMismatchError("statistical_distance: domains differ");
  }
  Rat sum(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += rat_abs(p.weight(i) - q.weight(i));
  }
  return sum / 2;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kSatisfied:
      return "satisfied";
    case Verdict::kViolated:
      return "violated";
    default:
      return "indeterminate";
  }
}

namespace {

// Excess mass of p over factor*q, with the pointwise maximizing event.
DirectionalCloseness directional(const FiniteDist& p, const FiniteDist& q,
                                 const Rat& factor_lower,
                                 const Rat& factor_upper) {
  DirectionalCloseness out;
  out.delta_upper = 0;
  out.delta_lower = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rat& a = p.weight(i);
    const Rat& b = q.weight(i);
    Rat lo_excess = a - factor_lower * b;
    if (lo_excess > 0) {
      out.delta_upper += lo_excess;
      ++out.witness_size;
      if (out.witness_event.size() < kWitnessCap) {
        out.witness_event.push_back(p.domain()->at(i));
      } else {
        out.witness_truncated = true;
      }
    }
    if (factor_upper == factor_lower) continue;
    Rat hi_excess = a - factor_upper * b;
    if (hi_excess > 0) out.delta_lower += hi_excess;
  }
  if (factor_upper == factor_lower) out.delta_lower = out.delta_upper;
  return out;
}

}  // namespace

ClosenessReport check_closeness(const FiniteDist& p, const FiniteDist& q,
                                const Eps& eps, const Rat& delta) {
  if (!same_domain(p.domain(), q.domain())) {
    throw DomainMismatchError("check_closeness: domains differ");
  }
  if (delta < 0 || delta > 1) throw ConfigError("delta outside [0,1]");
  ClosenessReport r;
  r.eps = eps;
  r.delta = delta;
  r.forward = directional(p, q, eps.factor_lower(), eps.factor_upper());
  r.backward = directional(q, p, eps.factor_lower(), eps.factor_upper());
  if (r.max_delta_upper() <= delta) {
    r.verdict = Verdict::kSatisfied;
  } else if (r.max_delta_lower() > delta) {
    r.verdict = Verdict::kViolated;
  } else {
    r.verdict = Verdict::kIndeterminate;
  }
  return r;
}

namespace {

// Smallest E >= 1 with f(E) = sum_y max(0, a_y - E b_y) <= budget, in one
// direction. f is convex, continuous, non-increasing, and piecewise linear
// in E with breakpoints at the ratios a_y / b_y, so the optimum is solved
// segment by segment.
std::optional<Rat> directional_min_factor(const FiniteDist& p,
                                          const FiniteDist& q,
                                          const Rat& delta) {
  Rat disjoint(0);
  std::vector<std::pair<Rat, std::pair<Rat, Rat>>> atoms;  // (a/b, (a, b))
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rat& a = p.weight(i);
    const Rat& b = q.weight(i);
    if (a == 0) continue;
    if (b == 0) {
      disjoint += a;
    } else if (a > b) {
      // Ratios <= 1 never contribute for E >= 1.
      atoms.push_back({a / b, {a, b}});
    }
  }
  if (disjoint > delta) return std::nullopt;
  Rat budget = delta - disjoint;

  Rat f_at_one(0);
  for (const auto& [r, ab] : atoms) f_at_one += ab.first - ab.second;
  if (f_at_one <= budget) return Rat(1);

  std::sort(atoms.begin(), atoms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  // Distinct ratios ascending with grouped (a, b) sums.
  std::vector<Rat> ratio;
  std::vector<Rat> ga, gb;
  for (const auto& [r, ab] : atoms) {
    if (ratio.empty() || !(ratio.back() == r)) {
      ratio.push_back(r);
      ga.push_back(ab.first);
      gb.push_back(ab.second);
    } else {
      ga.back() += ab.first;
      gb.back() += ab.second;
    }
  }
  std::size_t k = ratio.size();
  std::vector<Rat> sufa(k + 1, Rat(0)), sufb(k + 1, Rat(0));
  for (std::size_t j = k; j-- > 0;) {
    sufa[j] = sufa[j + 1] + ga[j];
    sufb[j] = sufb[j + 1] + gb[j];
  }
  // On [lo_j, ratio[j]] with lo_0 = 1 and lo_j = ratio[j-1], the excess is
  // sufa[j] - E * sufb[j]; f(ratio[k-1]) = 0, so a crossing always exists.
  for (std::size_t j = 0; j < k; ++j) {
    Rat f_hi = sufa[j] - ratio[j] * sufb[j];
    if (f_hi <= budget) {
      Rat e = (sufa[j] - budget) / sufb[j];
      if (e < 1) e = 1;
      return e;
    }
  }
  throw InternalError("minimal factor search fell through");
}

}  // namespace

std::optional<Rat> minimal_closeness_factor(const FiniteDist& p,
                                            const FiniteDist& q,
                                            const Rat& delta) {
  if (!same_domain(p.domain(), q.domain())) {
    throw DomainMismatchError("minimal_closeness_factor: domains differ");
  }
  auto f = directional_min_factor(p, q, delta);
  auto b = directional_min_factor(q, p, delta);
  if (!f || !b) return std::nullopt;
  Rat e = *f > *b ? *f : *b;
  return e < 1 ? Rat(1) : e;
}

double empirical_epsilon(const FiniteDist& p, const FiniteDist& q,
                         const Rat& delta) {
  auto f = minimal_closeness_factor(p, q, delta);
  if (!f) return std::numeric_limits<double>::infinity();
  return std::log(rat_to_double(*f));
}

JointDist::JointDist(std::vector<DomainPtr> domains, std::vector<Rat> weights)
    : domains_(std::move(domains)), weights_(std::move(weights)) {
  if (domains_.empty()) throw ConfigError("joint distribution needs >= 1 coordinate");
  std::size_t expect = 1;
  for (const DomainPtr& d : domains_) {
    if (!d) throw ConfigError("null component domain");
    expect *= d->size();
  }
  if (weights_.size() != expect) {
    throw ConfigError("joint weight table size mismatch");
  }
  Rat total(0);
  for (const Rat& w : weights_) {
    if (w < 0) throw ConfigError("negative joint weight");
    total += w;
  }
  if (total != 1) {
    throw ConfigError("joint weights sum to " + rat_to_string(total) +
                      ", not 1");
  }
}

JointDist JointDist::product(const std::vector<FiniteDist>& factors) {
  if (factors.empty()) throw ConfigError("empty product");
  std::vector<DomainPtr> doms;
  for (const FiniteDist& f : factors) doms.push_back(f.domain());
  std::size_t total = 1;
  for (const DomainPtr& d : doms) total *= d->size();
  std::vector<Rat> w(total, Rat(0));
  std::vector<std::size_t> idx(factors.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Rat prod(1);
    std::size_t rem = flat;
    for (std::size_t c = factors.size(); c-- > 0;) {
      std::size_t sz = doms[c]->size();
      idx[c] = rem % sz;
      rem /= sz;
    }
    for (std::size_t c = 0; c < factors.size(); ++c) {
      prod *= factors[c].weight(idx[c]);
      if (prod == 0) break;
    }
    w[flat] = prod;
  }
  return JointDist(std::move(doms), std::move(w));
}

JointDist JointDist::from_atoms(
    std::vector<DomainPtr> domains,
    const std::vector<std::pair<Value::List, Rat>>& atoms) {
  std::size_t total = 1;
  for (const DomainPtr& d : domains) total *= d->size();
  std::vector<Rat> w(total, Rat(0));
  for (const auto& [tuple, mass] : atoms) {
    if (tuple.size() != domains.size()) {
      throw ConfigError("atom arity mismatch");
    }
    std::size_t flat = 0;
    for (std::size_t c = 0; c < domains.size(); ++c) {
      auto i = domains[c]->index_of(tuple[c]);
      if (!i) {
        throw DomainMismatchError("atom value " + tuple[c].to_string() +
                                  " outside component domain");
      }
      flat = flat * domains[c]->size() + *i;
    }
    w[flat] += mass;
  }
  return JointDist(std::move(domains), std::move(w));
}

std::size_t JointDist::flat_index(const std::vector<std::size_t>& idx) const {
  std::size_t flat = 0;
  for (std::size_t c = 0; c < domains_.size(); ++c) {
    flat = flat * domains_[c]->size() + idx[c];
  }
  return flat;
}

Rat JointDist::prob_of(const Value::List& tuple) const {
  if (tuple.size() != domains_.size()) throw ConfigError("tuple arity mismatch");
  std::vector<std::size_t> idx(domains_.size());
  for (std::size_t c = 0; c < domains_.size(); ++c) {
    auto i = domains_[c]->index_of(tuple[c]);
    if (!i) return Rat(0);
    idx[c] = *i;
  }
  return weights_[flat_index(idx)];
}

void JointDist::for_each_atom(
    const std::function<void(const Value::List&, const Rat&)>& fn) const {
  std::vector<std::size_t> idx(domains_.size(), 0);
  Value::List tuple(domains_.size());
  std::size_t total = weights_.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t c = domains_.size(); c-- > 0;) {
      std::size_t sz = domains_[c]->size();
      idx[c] = rem % sz;
      rem /= sz;
    }
    if (weights_[flat] > 0) {
      for (std::size_t c = 0; c < domains_.size(); ++c) {
        tuple[c] = domains_[c]->at(idx[c]);
      }
      fn(tuple, weights_[flat]);
    }
  }
}

JointDist JointDist::marginal(const std::vector<std::size_t>& coords) const {
  if (coords.empty()) throw ConfigError("marginal over empty coordinate set");
  std::vector<DomainPtr> doms;
  for (std::size_t c : coords) {
    if (c >= domains_.size()) throw ConfigError("marginal coordinate out of range");
    doms.push_back(domains_[c]);
  }
  std::size_t total = 1;
  for (const DomainPtr& d : doms) total *= d->size();
  std::vector<Rat> w(total, Rat(0));
  for_each_atom([&](const Value::List& tuple, const Rat& mass) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      flat = flat * doms[j]->size() + *doms[j]->index_of(tuple[coords[j]]);
    }
    w[flat] += mass;
  });
  return JointDist(std::move(doms), std::move(w));
}

FiniteDist JointDist::marginal_single(std::size_t coord) const {
  if (coord >= domains_.size()) throw ConfigError("coordinate out of range");
  std::vector<Rat> w(domains_[coord]->size(), Rat(0));
  for_each_atom([&](const Value::List& tuple, const Rat& mass) {
    w[*domains_[coord]->index_of(tuple[coord])] += mass;
  });
  return FiniteDist(domains_[coord], std::move(w));
}

JointDist JointDist::condition(
    const std::vector<std::pair<std::size_t, Value>>& fixed) const {
  if (fixed.empty()) return *this;
  std::vector<bool> is_fixed(domains_.size(), false);
  std::vector<Value> fixed_value(domains_.size());
  for (const auto& [c, v] : fixed) {
    if (c >= domains_.size()) throw ConfigError("condition coordinate out of range");
    is_fixed[c] = true;
    fixed_value[c] = v;
  }
  std::vector<std::size_t> rest;
  std::vector<DomainPtr> rest_doms;
  for (std::size_t c = 0; c < domains_.size(); ++c) {
    if (!is_fixed[c]) {
      rest.push_back(c);
      rest_doms.push_back(domains_[c]);
    }
  }
  if (rest.empty()) throw ConfigError("conditioning fixes every coordinate");
  std::size_t total = 1;
  for (const DomainPtr& d : rest_doms) total *= d->size();
  std::vector<Rat> w(total, Rat(0));
  Rat mass_seen(0);
  for_each_atom([&](const Value::List& tuple, const Rat& mass) {
    for (std::size_t c = 0; c < domains_.size(); ++c) {
      if (is_fixed[c] && !(tuple[c] == fixed_value[c])) return;
    }
    std::size_t flat = 0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      flat = flat * rest_doms[j]->size() +
             *rest_doms[j]->index_of(tuple[rest[j]]);
    }
    w[flat] += mass;
    mass_seen += mass;
  });
  if (mass_seen == 0) {
    throw ZeroMassError("conditioning on a zero-probability event");
  }
  for (Rat& x : w) x /= mass_seen;
  return JointDist(std::move(rest_doms), std::move(w));
}

FiniteDist JointDist::as_tuple_dist() const {
  DistBuilder b;
  for_each_atom([&](const Value::List& tuple, const Rat& mass) {
    b.add(Value(tuple), mass);
  });
  return b.build();
}

FiniteDist posterior(const FiniteDist& prior,
                     const std::function<FiniteDist(const Value&)>& channel,
                     const Value& observation) {
  DistBuilder b;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (prior.weight(i) == 0) continue;
    const Value& x = prior.domain()->at(i);
    Rat like = channel(x).prob_of(observation);
    if (like > 0) b.add(x, prior.weight(i) * like);
  }
  if (b.total() == 0) {
    throw ZeroMassError("posterior: observation " + observation.to_string() +
                        " has zero marginal probability");
  }
  // Keep the prior's domain so posteriors across observations align.
  FiniteDist collapsed = b.build_normalized();
  std::vector<Rat> w(prior.size(), Rat(0));
  for (std::size_t i = 0; i < prior.size(); ++i) {
    w[i] = collapsed.prob_of(prior.domain()->at(i));
  }
  return FiniteDist(prior.domain(), std::move(w));
}

}  // namespace msdp
