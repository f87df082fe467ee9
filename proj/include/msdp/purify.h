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

#ifndef MSDP_PURIFY_H_
#define MSDP_PURIFY_H_

#include <optional>
#include <vector>

#include "msdp/dist.h"

namespace msdp {

// min c.x  subject to  rows[i].x (<= | ==) rhs[i],  x >= 0.
// Solved with exact rational two-phase simplex (Bland's rule), so
// feasibility answers are exact.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  std::vector<bool> is_equality;
  std::vector<Rat> objective;
};

struct LpSolution {
  bool feasible = false;
  std::vector<Rat> x;
  Rat objective;
};

LpSolution solve_lp(const LinearProgram& lp);

// A pure-DP replacement channel: within delta of the original conditionals
// in statistical distance, with all pointwise likelihood ratios bounded by
// e^{2 eps}.
struct PurifiedChannel {
  DomainPtr input_domain;
  DomainPtr output_domain;
  std::vector<FiniteDist> table;          // per input symbol
  std::vector<Rat> distance_to_original;  // per input symbol
  Rat ratio_bound;                        // measured max pointwise ratio
  bool changed = false;
  // The exact pure-DP target had to be relaxed to the upper factor bound
  // (only possible for irrational eps at extreme precision boundaries).
  bool used_upper_factor = false;

  const FiniteDist& dist(std::size_t input_index) const {
    return table[input_index];
  }
};

// Finds a channel that is exactly pure-DP at factor e^{2 eps} with
// per-input statistical distance at most delta from the original. Returns
// the original unchanged when it already meets the pure bound (always the
// case for delta = 0 inputs that were honestly (eps, 0)-private). The
// search is a feasibility program over the finite output alphabet,
// minimizing the total moved mass.
PurifiedChannel purify(const DomainPtr& input_domain,
                       const std::vector<FiniteDist>& channel, const Eps& eps,
                       const Rat& delta);

// Max pointwise likelihood ratio across inputs; nullopt when some output
// has positive mass under one input and zero under another.
std::optional<Rat> pure_dp_ratio(const std::vector<FiniteDist>& channel);

}  // namespace msdp

#endif  // MSDP_PURIFY_H_
