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

#ifndef MSDP_RNG_H_
#define MSDP_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

#include "msdp/dist.h"

namespace msdp {

// Seeded stream with deterministic splitting: concurrent tasks each get an
// independent child derived from (root seed, stream label), so runs are
// reproducible regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double next_double();

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

// Prepared cumulative table for repeated draws from one distribution.
// Sampling is the one place doubles are allowed; verdict-bearing
// computations never pass through here.
class Sampler {
 public:
  explicit Sampler(const FiniteDist& dist);

  std::size_t draw_index(Rng& rng) const;
  const Value& draw(Rng& rng) const;

 private:
  DomainPtr domain_;
  std::vector<double> cum_;
};

// One-off draw; builds a throwaway table.
const Value& sample(const FiniteDist& dist, Rng& rng);

}  // namespace msdp

#endif  // MSDP_RNG_H_
