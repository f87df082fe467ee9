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

#include "msdp/errors.h"

namespace msdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x51ed2701a7b4e1d3ULL)));
}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::next_double() {
  // 53 random bits into [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

Sampler::Sampler(const FiniteDist& dist) : domain_(dist.domain()) {
  cum_.reserve(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += rat_to_double(dist.weight(i));
    cum_.push_back(acc);
  }
  if (!cum_.empty()) cum_.back() = 1.0;
}

std::size_t Sampler::draw_index(Rng& rng) const {
  double u = rng.next_double();
  std::size_t lo = 0, hi = cum_.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (u < cum_[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

const Value& Sampler::draw(Rng& rng) const {
  return domain_->at(draw_index(rng));
}

const Value& sample(const FiniteDist& dist, Rng& rng) {
  Sampler s(dist);
  return dist.domain()->at(s.draw_index(rng));
}

}  // namespace msdp
