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

#ifndef MSDP_TRANSFORM_H_
#define MSDP_TRANSFORM_H_

#include <atomic>
#include <memory>
#include <optional>
#include <vector>

#include "msdp/online.h"
#include "msdp/protocol.h"
#include "msdp/purify.h"

namespace msdp {

// Stream budget for the rejection-sampling stage. With ell = 1/(2 e^{2 eps})
// a lower bound on every acceptance probability, v trials suffice for all n
// acceptances except with probability beta:
//   v = ceil(n + (2n/ell) ln(1/ell) + (2/ell) ln(1/beta)),  m = n + v.
struct TransformBudget {
  int n = 0;
  Rat ell;
  Rat beta;
  long v = 0;
  long m = 0;
};

TransformBudget sample_budget(int n, const Eps& eps, const Rat& beta);
// Same tail expression with an explicitly given rate floor.
TransformBudget budget_with_ell(int n, const Rat& ell, const Rat& beta);
// Audit-scale copy with a shorter stream; the distance guarantee weakens
// but per-step privacy structure is unchanged.
TransformBudget budget_with_stream_length(const TransformBudget& b, long m);

// Deliberately broken variants shipped as auditor negative controls.
enum class MutantKind {
  kNone,
  // Keeps each first-batch message in state after its second message is
  // produced instead of erasing it.
  kNoErasure,
  // Uses the raw likelihood as the acceptance rate, without the
  // 2 * max_u normalization.
  kRateDenominatorDropped,
};

// The output symbol emitted when the stream ends before all n acceptances.
const Value& budget_exhausted_symbol();

// A two-server protocol prepared for simulation: per-user purified first
// marginals plus cached acceptance-rate denominators.
class TwoServerModel {
 public:
  TwoServerModel(Protocol p, const Eps& eps, const Rat& delta);
  // Bypasses purification with caller-supplied replacement channels;
  // diagnostic harnesses use this to study uncleaned first coordinates.
  TwoServerModel(Protocol p, const Eps& eps, const Rat& delta,
                 std::vector<PurifiedChannel> purified);

  const Protocol& protocol() const { return p_; }
  const Eps& eps() const { return eps_; }
  const Rat& delta() const { return delta_; }
  const PurifiedChannel& purified(int user) const { return purified_[user]; }
  bool purification_skipped() const;

  // Count of conditional draws that hit a first-coordinate support mismatch
  // between the purified and original channels (possible only when
  // purification moved mass); those draws fall back to the unconditioned
  // second marginal.
  long support_fallbacks() const { return fallbacks_->load(); }

  FiniteDist purified_first_dist(int user, const Value& x) const;
  FiniteDist original_first_dist(int user, const Value& x) const;
  // y2 ~ R_{i,2}(x) | R_{i,1}(x) = y1, from the original joint channel.
  FiniteDist second_given_first(int user, const Value& x,
                                const Value& y1) const;

  // max_u P[purified_first(u) = y1], cached per (user, y1).
  const Rat& max_first_prob(int user, const Value& y1) const;
  Rat acceptance_rate(int user, const Value& x, const Value& y1,
                      MutantKind mutant = MutantKind::kNone) const;

  const DomainPtr& input_domain() const { return p_.input_domain(); }
  const DomainPtr& first_message_domain() const;

 private:
  Protocol p_;
  Eps eps_;
  Rat delta_;
  std::vector<PurifiedChannel> purified_;
  std::vector<std::vector<Rat>> max_first_;  // [user][y1 index]
  std::shared_ptr<std::atomic<long>> fallbacks_;
};

// Exact output distribution of the hybrid that swaps the first-coordinate
// randomizers for their purified versions and otherwise runs the protocol.
FiniteDist m1_output_distribution(const TwoServerModel& model,
                                  const Value::List& x, std::size_t ceiling);
FiniteDist m1_output_distribution(const TwoServerModel& model,
                                  const FiniteDist& prior,
                                  std::size_t ceiling);

// Exact output distribution of the Bayesian re-sampling thought experiment:
// phase one produces first messages and z; phase two redraws each user's
// data from the posterior given its first message and produces the second
// message from the redrawn value.
FiniteDist m2_output_distribution(const TwoServerModel& model,
                                  const FiniteDist& prior,
                                  std::size_t ceiling);

// Per reachable (user, first message): the acceptance rates, their mixture
// under the prior, and the accepted-sample law computed by the rejection
// route, alongside the posterior computed by Bayes rule. The two laws being
// equal is the correctness of rejection sampling; tests compare them as
// independent code paths.
struct AcceptanceCell {
  int user = 0;
  Value y1;
  std::vector<Rat> rates;  // indexed by input symbol
  Rat mixture_rate;
  FiniteDist accepted_dist;
  FiniteDist posterior_dist;
};

std::vector<AcceptanceCell> enumerate_acceptance(
    const TwoServerModel& model, const FiniteDist& prior,
    MutantKind mutant = MutantKind::kNone);

// P[sum of n independent geometrics with success probabilities p <= trials].
Rat geo_complete_prob(const std::vector<Rat>& p, long trials);

// The rejection-sampling online algorithm over streams of length budget.m.
// States carry exactly the variables the algorithm has not erased: the
// pending first-batch messages, z, the produced second messages, the
// pointer, and the coin history.
OnlineAlgorithm build_m3(const TwoServerModel& model,
                         const TransformBudget& budget,
                         MutantKind mutant = MutantKind::kNone);

// Walks every reachable snapshot of an m3-shaped algorithm on the given
// stream and verifies the erasure discipline structurally. Returns the
// number of states inspected; throws InternalError on a violation.
std::size_t verify_m3_erasure(const OnlineAlgorithm& alg,
                              const Value::List& stream, std::size_t ceiling);

// Exact output distribution of the rejection sampler on i.i.d. prior
// streams, computed by marginalizing the geometric waiting times rather
// than enumerating coin histories. budget_v = nullopt gives the unbounded-
// stream variant (waiting times marginalized exactly; no truncation).
struct M3OutputResult {
  FiniteDist output;
  Rat truncation_mass;  // probability of the budget-exhausted symbol
};

M3OutputResult m3_output_distribution(const TwoServerModel& model,
                                      const FiniteDist& prior,
                                      std::optional<long> budget_v,
                                      std::size_t ceiling,
                                      MutantKind mutant = MutantKind::kNone);

// The half-split server reduction: first messages of the first ceil(k/2)
// servers bundled as one coordinate, the rest as the other; server one
// simulates the first half, server two the rest. Output distributions are
// preserved exactly. k = 2 protocols are returned unchanged.
struct ReductionGrouping {
  int k = 0;
  int first_half_end = 0;  // h = ceil(k/2); first half is servers 0..h-1
  std::vector<std::pair<int, int>> bundled_edges;  // cross-half, sorted
};

ReductionGrouping reduction_grouping(const Protocol& p);
Protocol reduce_k_to_2(const Protocol& p);

// Bundles an original-protocol transcript into the reduced protocol's
// message structure (intra-half server messages become internal randomness
// and are dropped).
Transcript reduce_transcript(const Protocol& original, const Transcript& t);

// The original-protocol attack matching a reduced-protocol attack with at
// most one corrupted server.
Attack lift_reduced_attack(const Protocol& original, const Attack& reduced);

struct TransformResult {
  Protocol reduced;
  std::shared_ptr<TwoServerModel> model;
  TransformBudget budget;
  std::optional<OnlineAlgorithm> algorithm;
  std::optional<ReductionGrouping> grouping;
  Eps claimed_eps = Eps::zero();    // 7 eps
  Rat claimed_delta;                // 3 e^{5 eps} delta
  bool was_certified = false;
};

// Full pipeline: reduce to two servers, purify first marginals, build the
// rejection sampler at the tail-bound budget. Unless `attested`, the input
// protocol is first certified (eps, delta)-private against ceil(k/2)
// corrupted servers; an uncertified protocol is rejected.
TransformResult transform_protocol(const Protocol& p, const Eps& eps,
                                   const Rat& delta, const Rat& beta,
                                   bool attested, std::size_t ceiling,
                                   MutantKind mutant = MutantKind::kNone);

}  // namespace msdp

#endif  // MSDP_TRANSFORM_H_
