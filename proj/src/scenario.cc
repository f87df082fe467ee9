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

#include "msdp/scenario.h"

#include <fstream>
#include <map>
#include <sstream>

namespace msdp {

using nlohmann::json;

namespace {

Rat rat_field(const json& doc, const std::string& path) {
  if (doc.is_string()) return rat_from_string(doc.get<std::string>());
  if (doc.is_number_integer()) return Rat(doc.get<long>());
  throw ConfigError(path + ": expected a fraction string or integer");
}

}  // namespace

Eps eps_from_json(const json& doc) {
  if (doc.contains("factor")) {
    return Eps::from_factor(rat_field(doc.at("factor"), "epsilon.factor"));
  }
  if (doc.contains("exponent")) {
    return Eps::from_exponent(
        rat_field(doc.at("exponent"), "epsilon.exponent"));
  }
  throw ConfigError("epsilon: expected {factor} or {exponent}");
}

namespace {

Randomizer randomizer_from_json(const json& doc) {
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "rr-pair") {
    return rr_pair_randomizer(rat_field(doc.at("flip"), "randomizer.flip"));
  }
  if (kind == "xor-shares") {
    return xor_share_randomizer(
        rat_field(doc.at("noise"), "randomizer.noise"));
  }
  if (kind == "xor-shares-k") {
    return xor_share_k_randomizer(doc.at("k").get<std::size_t>());
  }
  if (kind == "cleartext") {
    return cleartext_randomizer();
  }
  if (kind == "counting") {
    return counting_randomizer(doc.at("t").get<int>(),
                               eps_from_json(doc.at("epsilon")));
  }
  throw ConfigError("randomizer.kind: unknown kind '" + kind + "'");
}

ServerAlg server_from_json(const json& doc, const std::string& path) {
  std::string kind = doc.at("kind").get<std::string>();
  if (kind == "forward") return forward_server();
  if (kind == "xor") {
    Rat flip = doc.contains("flip") ? rat_field(doc.at("flip"), path + ".flip")
                                    : Rat(0);
    return xor_server(flip);
  }
  if (kind == "const") {
    return constant_server(Value(doc.at("value").get<std::int64_t>()));
  }
  if (kind == "linear") {
    LinearServerSpec spec;
    if (doc.contains("user_sign")) spec.user_sign = doc.at("user_sign").get<int>();
    if (doc.contains("server_sign")) {
      spec.server_sign = doc.at("server_sign").get<int>();
    }
    if (doc.contains("offset")) spec.offset = doc.at("offset").get<std::int64_t>();
    if (doc.contains("clamp")) {
      spec.user_clamp = {{doc.at("clamp").at(0).get<std::int64_t>(),
                          doc.at("clamp").at(1).get<std::int64_t>()}};
    }
    if (doc.contains("noise")) {
      spec.noise = dt_pmf(doc.at("noise").at("t").get<int>(),
                          eps_from_json(doc.at("noise").at("epsilon")));
    }
    return linear_server(std::move(spec));
  }
  throw ConfigError(path + ".kind: unknown kind '" + kind + "'");
}

Protocol protocol_from_json(const json& doc) {
  Protocol p;
  p.n = doc.at("n").get<int>();
  const json& dag = doc.at("dag");
  p.dag.k = dag.at("k").get<int>();
  for (const json& e : dag.at("edges")) {
    // Edges are 1-based in configuration documents.
    p.dag.edges.push_back({e.at(0).get<int>() - 1, e.at(1).get<int>() - 1});
  }
  std::sort(p.dag.edges.begin(), p.dag.edges.end());
  Randomizer r = randomizer_from_json(doc.at("randomizer"));
  p.randomizers.assign(p.n, r);
  const json& servers = doc.at("servers");
  for (std::size_t j = 0; j < servers.size(); ++j) {
    p.servers.push_back(server_from_json(
        servers.at(j), "servers[" + std::to_string(j) + "]"));
  }
  p.validate();
  return p;
}

}  // namespace

ScenarioConfig load_scenario_json(const json& doc) {
  ScenarioConfig cfg;
  cfg.name = doc.value("name", std::string("unnamed"));
  try {
    if (doc.contains("counting")) {
      const json& c = doc.at("counting");
      CountingParams params = make_counting_params(
          c.at("n").get<int>(), rat_field(c.at("epsilon"), "counting.epsilon"),
          rat_field(c.at("delta"), "counting.delta"));
      if (c.contains("t_override")) {
        params.t = c.at("t_override").get<int>();
      }
      cfg.counting = params;
      cfg.protocol = counting_protocol(params);
      cfg.eps = Eps::from_exponent(params.epsilon);
      cfg.delta = params.delta;
    } else {
      cfg.protocol = protocol_from_json(doc.at("protocol"));
      cfg.eps = eps_from_json(doc.at("epsilon"));
      cfg.delta = rat_field(doc.at("delta"), "delta");
    }
    if (doc.contains("prior")) {
      const json& pw = doc.at("prior");
      const DomainPtr& X = cfg.protocol.input_domain();
      if (pw.size() != X->size()) {
        throw ConfigError("prior: expected " + std::to_string(X->size()) +
                          " weights");
      }
      std::vector<Rat> w;
      for (const json& item : pw) w.push_back(rat_field(item, "prior"));
      cfg.prior = FiniteDist(X, std::move(w));
    } else if (cfg.protocol.n > 0) {
      cfg.prior = FiniteDist::uniform(cfg.protocol.input_domain());
    }
    if (doc.contains("beta")) cfg.beta = rat_field(doc.at("beta"), "beta");
    cfg.seed = doc.value("seed", std::uint64_t{1});
    cfg.trials = doc.value("trials", 100000L);
    cfg.ceiling = doc.value("ceiling", std::size_t{10'000'000});
    cfg.audit_stream_length = doc.value("audit_stream_length", -1L);
    cfg.max_corrupt_servers =
        doc.value("max_corrupt_servers", (cfg.protocol.dag.k + 1) / 2);
    std::string mutant = doc.value("mutant", std::string("none"));
    if (mutant == "none") {
      cfg.mutant = MutantKind::kNone;
    } else if (mutant == "no-erasure") {
      cfg.mutant = MutantKind::kNoErasure;
    } else if (mutant == "rate-denominator") {
      cfg.mutant = MutantKind::kRateDenominatorDropped;
    } else {
      throw ConfigError("mutant: unknown kind '" + mutant + "'");
    }
    if (doc.contains("audits")) {
      for (const json& a : doc.at("audits")) {
        cfg.audits.push_back(a.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario document: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario parse: ") + e.what());
  }
  return load_scenario_json(doc);
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

namespace {

const std::map<std::string, std::string>& builtin_map() {
  static const std::map<std::string, std::string> kBuiltins = {
      {"rr2-n1", R"json({
  "name": "rr2-n1",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "rr-pair", "flip": "1/3"},
    "servers": [{"kind": "forward"}, {"kind": "linear"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260801,
  "trials": 100000,
  "audit_stream_length": 4,
  "audits": ["protocol-dp", "subset-privacy", "m2-equals-m1",
             "rejection-posterior", "accept-rate-bounds",
             "transform-distance", "internal-privacy"]
})json"},
      {"rr2-n2", R"json({
  "name": "rr2-n2",
  "protocol": {
    "n": 2,
    "randomizer": {"kind": "rr-pair", "flip": "1/3"},
    "servers": [{"kind": "forward"}, {"kind": "linear"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260802,
  "trials": 100000,
  "audit_stream_length": 5,
  "audits": ["protocol-dp", "subset-privacy", "m2-equals-m1",
             "rejection-posterior", "accept-rate-bounds",
             "internal-privacy"]
})json"},
      {"counting", R"json({
  "name": "counting",
  "counting": {"n": 2, "epsilon": "1", "delta": "1/100"},
  "beta": "1/10",
  "seed": 20260803,
  "trials": 100000,
  "max_corrupt_servers": 1,
  "audits": ["counting-privacy", "counting-unbiased", "counting-error-p90",
             "counting-robustness", "subset-privacy"]
})json"},
      {"counting-n20", R"json({
  "name": "counting-n20",
  "counting": {"n": 20, "epsilon": "1", "delta": "1/100"},
  "beta": "1/10",
  "seed": 20260804,
  "trials": 100000,
  "max_corrupt_servers": 1,
  "audits": ["counting-unbiased", "counting-robustness"]
})json"},
      {"counting-weak", R"json({
  "name": "counting-weak",
  "counting": {"n": 2, "epsilon": "1", "delta": "1/100", "t_override": 2},
  "beta": "1/10",
  "seed": 20260805,
  "trials": 100000,
  "max_corrupt_servers": 1,
  "audits": ["counting-privacy"]
})json"},
      {"reduction3", R"json({
  "name": "reduction3",
  "protocol": {
    "n": 2,
    "randomizer": {"kind": "xor-shares-k", "k": 3},
    "servers": [{"kind": "xor"}, {"kind": "xor"},
                {"kind": "xor", "flip": "1/4"}],
    "dag": {"k": 3, "edges": [[1, 3], [2, 3]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "3"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260806,
  "trials": 100000,
  "audits": ["reduction-fidelity"]
})json"},
      {"cleartext", R"json({
  "name": "cleartext",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "cleartext"},
    "servers": [{"kind": "forward"}, {"kind": "const", "value": 0}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"exponent": "10"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260807,
  "trials": 100000,
  "audits": ["protocol-dp"]
})json"},
      {"sharing-negative", R"json({
  "name": "sharing-negative",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "xor-shares", "noise": "1/2"},
    "servers": [{"kind": "forward"}, {"kind": "xor"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260808,
  "trials": 100000,
  "audits": ["protocol-dp"]
})json"},
      {"xor-shares", R"json({
  "name": "xor-shares",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "xor-shares", "noise": "1/3"},
    "servers": [{"kind": "xor", "flip": "1/3"}, {"kind": "xor", "flip": "1/3"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260809,
  "trials": 100000,
  "audit_stream_length": 4,
  "audits": ["protocol-dp", "m2-equals-m1", "rejection-posterior",
             "accept-rate-bounds", "transform-distance", "internal-privacy"]
})json"},
      {"xor-shares-no-erasure", R"json({
  "name": "xor-shares-no-erasure",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "xor-shares", "noise": "1/3"},
    "servers": [{"kind": "xor", "flip": "1/3"}, {"kind": "xor", "flip": "1/3"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260810,
  "trials": 100000,
  "audit_stream_length": 4,
  "mutant": "no-erasure",
  "audits": ["internal-privacy"]
})json"},
      {"rr2-n1-rate-mutant", R"json({
  "name": "rr2-n1-rate-mutant",
  "protocol": {
    "n": 1,
    "randomizer": {"kind": "rr-pair", "flip": "1/3"},
    "servers": [{"kind": "forward"}, {"kind": "linear"}],
    "dag": {"k": 2, "edges": [[1, 2]]}
  },
  "prior": ["1/2", "1/2"],
  "epsilon": {"factor": "4"},
  "delta": "0",
  "beta": "1/10",
  "seed": 20260811,
  "trials": 100000,
  "audit_stream_length": 4,
  "mutant": "rate-denominator",
  "audits": ["accept-rate-bounds"]
})json"},
  };
  return kBuiltins;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& [name, text] : builtin_map()) names.push_back(name);
    return names;
  }();
  return kNames;
}

const std::string& builtin_scenario_text(const std::string& name) {
  auto it = builtin_map().find(name);
  if (it == builtin_map().end()) {
    throw ConfigError("unknown built-in scenario '" + name + "'");
  }
  return it->second;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  return load_scenario_text(builtin_scenario_text(name));
}

json value_to_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_int()) return v.as_int();
  if (v.is_string()) return v.as_string();
  json arr = json::array();
  for (const Value& item : v.as_list()) arr.push_back(value_to_json(item));
  return arr;
}

}  // namespace msdp
