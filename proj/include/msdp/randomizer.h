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

#ifndef MSDP_RANDOMIZER_H_
#define MSDP_RANDOMIZER_H_

#include <vector>

#include "msdp/dist.h"

namespace msdp {

// A per-user channel from one input symbol to a joint distribution over k
// message alphabets, one message per server.
class Randomizer {
 public:
  Randomizer(DomainPtr input_domain, std::vector<JointDist> channel);

  const DomainPtr& input_domain() const { return input_domain_; }
  std::size_t arity() const { return message_domains_.size(); }
  const std::vector<DomainPtr>& message_domains() const {
    return message_domains_;
  }

  const JointDist& channel(const Value& x) const;
  const JointDist& channel_by_index(std::size_t xi) const;

  // Restriction to the given message coordinates (0-based), preserving
  // their order. Rejects the empty subset.
  Randomizer marginal(const std::vector<std::size_t>& coords) const;

  // The single-coordinate channel as one FiniteDist per input, over the
  // coordinate's message domain.
  std::vector<FiniteDist> coordinate_channel(std::size_t coord) const;

 private:
  DomainPtr input_domain_;
  std::vector<DomainPtr> message_domains_;
  std::vector<JointDist> channel_;  // indexed by input symbol
};

// (RR(x), RR(x)): two independent randomized-response copies, each flipping
// the input bit with probability flip.
Randomizer rr_pair_randomizer(const Rat& flip);

// (x XOR eta, eta) with eta ~ Bernoulli(noise): a noisy additive share pair
// over bits. One coordinate alone is a randomized response (or pure noise);
// the XOR of both reconstructs x.
Randomizer xor_share_randomizer(const Rat& noise);

// k-way XOR secret sharing: uniformly random shares s_1..s_{k-1} and the
// final share chosen so all k XOR to x.
Randomizer xor_share_k_randomizer(std::size_t k);

// (x, 0): the input in the clear to server 1.
Randomizer cleartext_randomizer();

}  // namespace msdp

#endif  // MSDP_RANDOMIZER_H_
