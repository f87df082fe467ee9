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

#ifndef MSDP_DIST_H_
#define MSDP_DIST_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msdp/errors.h"
#include "msdp/rational.h"
#include "msdp/value.h"

namespace msdp {

// An explicitly enumerated, ordered, duplicate-free set of symbols.
class Domain {
 public:
  explicit Domain(std::vector<Value> elements);

  static std::shared_ptr<const Domain> make(std::vector<Value> elements);
  // Integers lo..hi inclusive.
  static std::shared_ptr<const Domain> ints(std::int64_t lo, std::int64_t hi);
  // {0, 1} as integers.
  static std::shared_ptr<const Domain> bits();

  std::size_t size() const { return elements_.size(); }
  const Value& at(std::size_t i) const { return elements_[i]; }
  const std::vector<Value>& elements() const { return elements_; }
  std::optional<std::size_t> index_of(const Value& v) const;

  bool operator==(const Domain& other) const;

 private:
  std::vector<Value> elements_;
  std::unordered_map<Value, std::size_t, ValueHash> index_;
};

using DomainPtr = std::shared_ptr<const Domain>;

bool same_domain(const DomainPtr& a, const DomainPtr& b);

// An exact probability mass function over a Domain. Weights are
// non-negative rationals summing to exactly one.
class FiniteDist {
 public:
  FiniteDist(DomainPtr domain, std::vector<Rat> weights);

  static FiniteDist point_mass(DomainPtr domain, const Value& v);
  static FiniteDist uniform(DomainPtr domain);
  // Over {0, 1} with P(1) = p_one.
  static FiniteDist bernoulli(const Rat& p_one);

  const DomainPtr& domain() const { return domain_; }
  std::size_t size() const { return weights_.size(); }
  const Rat& weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Rat>& weights() const { return weights_; }
  // Zero for values outside the domain.
  Rat prob_of(const Value& v) const;
  std::size_t support_size() const;

  // Pushforward through a deterministic map.
  FiniteDist map(const std::function<Value(const Value&)>& f) const;

  // Expectation, for integer-valued domains.
  Rat expectation_int() const;

  bool operator==(const FiniteDist& other) const;

 private:
  DomainPtr domain_;
  std::vector<Rat> weights_;
};

// Accumulates (value, mass) pairs from an enumeration and freezes them
// into a FiniteDist over the sorted support.
class DistBuilder {
 public:
  void add(const Value& v, const Rat& mass);
  // Adds every atom of d scaled by factor.
  void add_scaled(const FiniteDist& d, const Rat& factor);

  Rat total() const;
  std::size_t atoms() const { return mass_.size(); }

  // Requires total mass exactly one.
  FiniteDist build() const;
  // Divides by the total; throws ZeroMassError when empty.
  FiniteDist build_normalized() const;

 private:
  FiniteDist build_with_total(const Rat& denom) const;
  std::unordered_map<Value, Rat, ValueHash> mass_;
};

// Re-expresses two distributions over the union of their supports so they
// can be compared even when built over different enumerated domains.
std::pair<FiniteDist, FiniteDist> align_union(const FiniteDist& p,
                                              const FiniteDist& q);

// Half the L1 distance; the maximal event-probability gap.
Rat statistical_distance(const FiniteDist& p, const FiniteDist& q);

enum class Verdict { kSatisfied, kViolated, kIndeterminate };

std::string verdict_name(Verdict v);

// One direction of an (eps, delta) comparison. The optimal excess
//   max over events E of P(E) - e^eps * Q(E)
// is attained pointwise on { y : p_y > e^eps * q_y }, so it is computed in
// closed form rather than over 2^|domain| subsets. delta_upper is evaluated
// at the lower factor bound (an over-estimate of the true excess) and
// delta_lower at the upper bound; they coincide for exact Eps.
struct DirectionalCloseness {
  Rat delta_upper;
  Rat delta_lower;
  std::vector<Value> witness_event;
  std::size_t witness_size = 0;
  bool witness_truncated = false;
};

struct ClosenessReport {
  Eps eps = Eps::zero();
  Rat delta;
  DirectionalCloseness forward;   // P against e^eps * Q
  DirectionalCloseness backward;  // Q against e^eps * P
  Verdict verdict = Verdict::kIndeterminate;

  bool satisfied() const { return verdict == Verdict::kSatisfied; }
  Rat delta_forward() const { return forward.delta_upper; }
  Rat delta_backward() const { return backward.delta_upper; }
  Rat max_delta_upper() const {
    return forward.delta_upper > backward.delta_upper ? forward.delta_upper
                                                      : backward.delta_upper;
  }
  Rat max_delta_lower() const {
    return forward.delta_lower > backward.delta_lower ? forward.delta_lower
                                                      : backward.delta_lower;
  }
};

// Exact (eps, delta)-closeness test in both directions.
ClosenessReport check_closeness(const FiniteDist& p, const FiniteDist& q,
                                const Eps& eps, const Rat& delta);

// The exact smallest factor E >= 1 such that both directional excesses at
// factor E are <= delta; nullopt when no finite factor suffices (mass on
// disjoint support exceeding delta). The excess is piecewise linear in E,
// so the optimum is solved exactly on the ratio breakpoints.
std::optional<Rat> minimal_closeness_factor(const FiniteDist& p,
                                            const FiniteDist& q,
                                            const Rat& delta);

// ln of minimal_closeness_factor; +infinity when impossible.
double empirical_epsilon(const FiniteDist& p, const FiniteDist& q,
                         const Rat& delta);

// An exact joint distribution over a product of component domains,
// stored row-major.
class JointDist {
 public:
  JointDist(std::vector<DomainPtr> domains, std::vector<Rat> weights);

  static JointDist product(const std::vector<FiniteDist>& factors);
  static JointDist from_atoms(
      std::vector<DomainPtr> domains,
      const std::vector<std::pair<Value::List, Rat>>& atoms);

  std::size_t arity() const { return domains_.size(); }
  const std::vector<DomainPtr>& domains() const { return domains_; }
  std::size_t table_size() const { return weights_.size(); }
  Rat prob_of(const Value::List& tuple) const;

  // Marginal over the given coordinates, in the given order.
  JointDist marginal(const std::vector<std::size_t>& coords) const;
  FiniteDist marginal_single(std::size_t coord) const;

  // Exact conditional over the remaining coordinates given fixed values at
  // `fixed` coordinates. Throws ZeroMassError on a zero-probability event.
  JointDist condition(
      const std::vector<std::pair<std::size_t, Value>>& fixed) const;

  // The joint as a FiniteDist over tuple-valued symbols (positive atoms,
  // sorted).
  FiniteDist as_tuple_dist() const;

  // Enumerates positive-mass atoms.
  void for_each_atom(
      const std::function<void(const Value::List&, const Rat&)>& fn) const;

 private:
  std::size_t flat_index(const std::vector<std::size_t>& idx) const;

  std::vector<DomainPtr> domains_;
  std::vector<Rat> weights_;
};

// Exact Bayes rule: posterior over the prior's domain given an observation
// drawn through the channel. Throws ZeroMassError when the observation has
// zero marginal probability.
FiniteDist posterior(const FiniteDist& prior,
                     const std::function<FiniteDist(const Value&)>& channel,
                     const Value& observation);

}  // namespace msdp

#endif  // MSDP_DIST_H_
