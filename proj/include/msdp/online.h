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

#ifndef MSDP_ONLINE_H_
#define MSDP_ONLINE_H_

#include <functional>
#include <vector>

#include "msdp/dist.h"
#include "msdp/rng.h"

namespace msdp {

// An online algorithm as an (init, update, out) triple over explicit state
// symbols. update(i, s, x_i) may read only the i-th stream element, so the
// state at time t is a function of the prefix x_1..x_t and the algorithm's
// own coins.
class OnlineAlgorithm {
 public:
  using InitFn = std::function<FiniteDist()>;
  using UpdateFn =
      std::function<FiniteDist(int step, const Value& state, const Value& x)>;
  using OutFn = std::function<FiniteDist(const Value& state)>;

  OnlineAlgorithm(int stream_length, DomainPtr input_domain, InitFn init,
                  UpdateFn update, OutFn out);

  int stream_length() const { return m_; }
  const DomainPtr& input_domain() const { return input_domain_; }

  FiniteDist init() const { return init_(); }
  FiniteDist update(int step, const Value& state, const Value& x) const;
  FiniteDist out(const Value& state) const { return out_(state); }

 private:
  int m_;
  DomainPtr input_domain_;
  InitFn init_;
  UpdateFn update_;
  OutFn out_;
};

struct OnlineRun {
  Value output;
  std::vector<Value> snapshots;  // S_0 .. S_m when requested
};

OnlineRun run_online(const OnlineAlgorithm& alg, const Value::List& stream,
                     Rng& rng, bool keep_snapshots = true);

// Exact distribution of S_t by forward enumeration over update randomness.
FiniteDist state_distribution(const OnlineAlgorithm& alg,
                              const Value::List& stream, int t,
                              std::size_t ceiling);

// Exact output distribution out(S_m) for a fixed stream.
FiniteDist online_output_distribution(const OnlineAlgorithm& alg,
                                      const Value::List& stream,
                                      std::size_t ceiling);

// Joint (S_m, z_out) distribution; the batch-boundary snapshot includes the
// output computed at the end of the stream.
FiniteDist final_state_with_output(const OnlineAlgorithm& alg,
                                   const Value::List& stream,
                                   std::size_t ceiling);

struct InternalPrivacyCell {
  Value::List stream;
  Value::List stream_alt;
  int differing_index = -1;  // 1-based stream position
  int time = -1;             // intrusion time; stream_length+1 marks the
                             // output-augmented final snapshot
  ClosenessReport report;
};

struct InternalPrivacyOptions {
  std::size_t ceiling = 10'000'000;
  // Audit the (S_m, z_out) joint at the end of the stream as well.
  bool include_output_at_end = true;
  bool parallel = true;
  // Restrict to neighbor pairs whose differing position (1-based) lies in
  // [min_differing_index, max_differing_index]; used for per-batch claims.
  int min_differing_index = 1;
  int max_differing_index = -1;  // -1: no upper restriction
};

struct InternalPrivacyReport {
  Verdict verdict = Verdict::kIndeterminate;
  std::size_t cells = 0;
  InternalPrivacyCell worst;
};

// Exhaustive internal-privacy audit: every replace-one neighboring stream
// pair and every intrusion time, exact closeness of the state
// distributions. State distributions at time t depend only on the prefix
// x_1..x_t, so pairs are enumerated per prefix and times t < i* (identical
// distributions) are skipped.
InternalPrivacyReport check_internal_privacy(const OnlineAlgorithm& alg,
                                             const Eps& eps, const Rat& delta,
                                             const InternalPrivacyOptions& opts =
                                                 InternalPrivacyOptions{});

}  // namespace msdp

#endif  // MSDP_ONLINE_H_
