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

#ifndef MSDP_AUDITOR_H_
#define MSDP_AUDITOR_H_

#include <json.hpp>
#include <string>
#include <vector>

#include "msdp/scenario.h"

namespace msdp {

enum class AuditMode { kAuto, kExact, kMonteCarlo };

// One claim checked against one scenario. Exact-mode verdicts carry zero
// statistical uncertainty; Monte-Carlo verdicts carry trial counts and
// bootstrap intervals in `measured`.
struct AuditReport {
  std::string claim;
  std::string mode = "exact";
  Verdict verdict = Verdict::kIndeterminate;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json witness = nlohmann::json::object();
  std::string note;
};

const std::vector<std::string>& audit_names();

AuditReport run_audit(const ScenarioConfig& cfg, const std::string& name,
                      AuditMode mode = AuditMode::kAuto);

// Runs the selection (empty: the scenario's configured audits; if those are
// empty too, every applicable audit).
std::vector<AuditReport> run_audits(const ScenarioConfig& cfg,
                                    const std::vector<std::string>& selected,
                                    AuditMode mode = AuditMode::kAuto);

nlohmann::json audit_report_to_json(const AuditReport& report);
nlohmann::json closeness_to_json(const ClosenessReport& report);

// Empirical pmf with exact count/total weights.
FiniteDist empirical_from_samples(const std::vector<Value>& samples);

// Upper tail of the chi-square distribution, for goodness-of-fit checks.
double chi_square_pvalue(double statistic, int degrees_of_freedom);

// Tail-bound validation with explicit floor: samples sums of n geometrics
// at success probability ell and compares the exceedance frequency of the
// budget expression against beta plus three binomial standard deviations.
AuditReport audit_geo_tail_explicit(int n, const Rat& ell, const Rat& beta,
                                    long trials, std::uint64_t seed);

}  // namespace msdp

#endif  // MSDP_AUDITOR_H_
