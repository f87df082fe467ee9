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

#ifndef MSDP_COUNTING_H_
#define MSDP_COUNTING_H_

#include <cstdint>
#include <vector>

#include "msdp/protocol.h"

namespace msdp {

// Truncated discrete Laplace over {1..t}: weights proportional to
// exp(-eps * |t/2 - v|). Exact rationals when eps is the log of a rational;
// otherwise the base e^{-eps} is fixed to a 192-bit dyadic approximation
// (relative error far below 1e-15) and the table built exactly from it.
FiniteDist dt_pmf(int t, const Eps& noise_eps);

// Candidate support size for target (epsilon, delta): the smallest even t
// of the form 2*ceil((1/eps) ln(2/delta)). A candidate only; the auditor
// certifies the shifted-noise pair a posteriori.
int choose_t(double epsilon, double delta);

// Protocol-level parameters. Each of the two noisy observations an
// adversary can assemble gets half the (epsilon, delta) budget, so the
// noise is drawn at exponent epsilon/2 with t = choose_t(eps/2, delta/2);
// composition of the two observations then meets (epsilon, delta).
struct CountingParams {
  int n = 0;
  int t = 0;
  Eps noise_eps = Eps::zero();  // exponent of the noise distribution
  Rat epsilon;                  // protocol-level target
  Rat delta;
};

CountingParams make_counting_params(int n, const Rat& epsilon,
                                    const Rat& delta);

// (y1, y2) = (x + eta, eta) with eta drawn from dt_pmf(t, noise_eps).
Randomizer counting_randomizer(int t, const Eps& noise_eps);

// z = alpha + sum of in-range user messages; the range check [0, t+1] is
// the defense against malicious values.
ServerAlg counting_server1(int t, const Eps& noise_eps);
// z_out = z + alpha - t - sum of in-range user messages.
ServerAlg counting_server2(int t, const Eps& noise_eps);

Protocol counting_protocol(const CountingParams& params);

// Pure share arithmetic, for direct oracle checks.
std::int64_t clamped_sum(const std::vector<std::int64_t>& msgs, int t);

// A user who sends an arbitrary message pair instead of honest shares.
struct MaliciousUser {
  int index = 0;
  std::int64_t y1 = 0;
  std::int64_t y2 = 0;
};

// Repeated sampled runs with the noise table prepared once.
class CountingRunner {
 public:
  explicit CountingRunner(const CountingParams& params);
  std::int64_t run(const std::vector<int>& x,
                   const std::vector<MaliciousUser>& malicious,
                   Rng& rng) const;

 private:
  CountingParams params_;
  FiniteDist noise_;
  Sampler sampler_;
};

// One sampled run of the full pipeline with malicious users substituted in.
std::int64_t run_counting_once(const CountingParams& params,
                               const std::vector<int>& x,
                               const std::vector<MaliciousUser>& malicious,
                               Rng& rng);

// Exact E[z_out] by linearity; the noise terms cancel exactly for even t.
Rat counting_expected_output(const CountingParams& params,
                             const std::vector<int>& x,
                             const std::vector<MaliciousUser>& malicious);

// Exact q-quantile of |alpha1 + alpha2 - t|: the smallest value whose
// cumulative probability reaches q.
Rat counting_error_quantile(int t, const Eps& noise_eps, const Rat& q);

}  // namespace msdp

#endif  // MSDP_COUNTING_H_
