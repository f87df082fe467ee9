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

#include "msdp/randomizer.h"

namespace msdp {

Randomizer::Randomizer(DomainPtr input_domain, std::vector<JointDist> channel)
    : input_domain_(std::move(input_domain)), channel_(std::move(channel)) {
  if (!input_domain_) throw ConfigError("randomizer needs an input domain");
  if (channel_.size() != input_domain_->size()) {
    throw ConfigError("randomizer channel must cover every input symbol");
  }
  message_domains_ = channel_.front().domains();
  for (const JointDist& j : channel_) {
    if (j.arity() != message_domains_.size()) {
      throw ConfigError("randomizer conditionals disagree on arity");
    }
    for (std::size_t c = 0; c < j.arity(); ++c) {
      if (!same_domain(j.domains()[c], message_domains_[c])) {
        throw ConfigError("randomizer conditionals disagree on domains");
      }
    }
  }
}

const JointDist& Randomizer::channel(const Value& x) const {
  auto idx = input_domain_->index_of(x);
  if (!idx) {
    throw DomainMismatchError("randomizer input " + x.to_string() +
                              " outside input domain");
  }
  return channel_[*idx];
}

const JointDist& Randomizer::channel_by_index(std::size_t xi) const {
  return channel_[xi];
}

Randomizer Randomizer::marginal(const std::vector<std::size_t>& coords) const {
  if (coords.empty()) throw ConfigError("marginal over empty server subset");
  std::vector<JointDist> out;
  out.reserve(channel_.size());
  for (const JointDist& j : channel_) out.push_back(j.marginal(coords));
  return Randomizer(input_domain_, std::move(out));
}

std::vector<FiniteDist> Randomizer::coordinate_channel(
    std::size_t coord) const {
  std::vector<FiniteDist> out;
  out.reserve(channel_.size());
  for (const JointDist& j : channel_) out.push_back(j.marginal_single(coord));
  return out;
}

Randomizer rr_pair_randomizer(const Rat& flip) {
  if (flip < 0 || flip > 1) throw ConfigError("flip probability outside [0,1]");
  DomainPtr bits = Domain::bits();
  std::vector<JointDist> channel;
  for (int x = 0; x <= 1; ++x) {
    Rat keep = Rat(1) - flip;
    Rat p1 = (x == 1) ? keep : flip;  // P(coordinate = 1)
    FiniteDist coord = FiniteDist::bernoulli(p1);
    channel.push_back(JointDist::product({coord, coord}));
  }
  return Randomizer(bits, std::move(channel));
}

Randomizer xor_share_randomizer(const Rat& noise) {
  DomainPtr bits = Domain::bits();
  std::vector<JointDist> channel;
  for (int x = 0; x <= 1; ++x) {
    std::vector<std::pair<Value::List, Rat>> atoms;
    for (int eta = 0; eta <= 1; ++eta) {
      Rat w = (eta == 1) ? noise : Rat(1) - noise;
      if (w == 0) continue;
      atoms.push_back({{Value(x ^ eta), Value(eta)}, w});
    }
    channel.push_back(JointDist::from_atoms({bits, bits}, atoms));
  }
  return Randomizer(bits, std::move(channel));
}

Randomizer xor_share_k_randomizer(std::size_t k) {
  if (k < 2) throw ConfigError("xor sharing needs k >= 2");
  DomainPtr bits = Domain::bits();
  std::vector<DomainPtr> doms(k, bits);
  std::vector<JointDist> channel;
  Rat w(1, 1UL << (k - 1));
  for (int x = 0; x <= 1; ++x) {
    std::vector<std::pair<Value::List, Rat>> atoms;
    for (std::size_t mask = 0; mask < (1ULL << (k - 1)); ++mask) {
      Value::List tuple;
      int parity = 0;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        int bit = (mask >> j) & 1;
        parity ^= bit;
        tuple.emplace_back(bit);
      }
      tuple.emplace_back(parity ^ x);
      atoms.push_back({tuple, w});
    }
    channel.push_back(JointDist::from_atoms(doms, atoms));
  }
  return Randomizer(bits, std::move(channel));
}

Randomizer cleartext_randomizer() {
  DomainPtr bits = Domain::bits();
  std::vector<JointDist> channel;
  for (int x = 0; x <= 1; ++x) {
    channel.push_back(JointDist::from_atoms(
        {bits, bits}, {{{Value(x), Value(0)}, Rat(1)}}));
  }
  return Randomizer(bits, std::move(channel));
}

}  // namespace msdp
