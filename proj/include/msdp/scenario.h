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

#ifndef MSDP_SCENARIO_H_
#define MSDP_SCENARIO_H_

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "msdp/counting.h"
#include "msdp/protocol.h"
#include "msdp/transform.h"

namespace msdp {

// A fully specified experiment: protocol, prior, privacy parameters, and
// audit selection. Probability weights serialize as exact fraction strings
// so exactness survives the round trip.
struct ScenarioConfig {
  std::string name;
  Protocol protocol;
  FiniteDist prior = FiniteDist::bernoulli(Rat(1, 2));
  Eps eps = Eps::zero();
  Rat delta;
  Rat beta = Rat(1, 10);
  std::uint64_t seed = 1;
  long trials = 100000;
  std::size_t ceiling = 10'000'000;
  // Stream length for exhaustive internal-privacy audits; the per-step
  // privacy claims hold for any stream length, so audits run at desk scale.
  long audit_stream_length = -1;  // -1: n + 3
  MutantKind mutant = MutantKind::kNone;
  int max_corrupt_servers = 1;
  std::vector<std::string> audits;
  std::optional<CountingParams> counting;

  long effective_audit_stream_length() const {
    return audit_stream_length > 0 ? audit_stream_length : protocol.n + 3;
  }
};

ScenarioConfig load_scenario_json(const nlohmann::json& doc);
ScenarioConfig load_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

const std::vector<std::string>& builtin_scenario_names();
const std::string& builtin_scenario_text(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

nlohmann::json value_to_json(const Value& v);

Eps eps_from_json(const nlohmann::json& doc);

}  // namespace msdp

#endif  // MSDP_SCENARIO_H_
