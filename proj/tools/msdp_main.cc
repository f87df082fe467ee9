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

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "msdp/auditor.h"
#include "msdp/errors.h"
#include "msdp/scenario.h"
#include "msdp/transform.h"

namespace {

using msdp::ScenarioConfig;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string scenario_name;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<std::size_t> ceiling;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "scenario document path");
  cmd->add_option("--scenario", opts->scenario_name,
                  "built-in scenario name");
  cmd->add_option("--seed", opts->seed, "root seed");
  cmd->add_option("--trials", opts->trials, "Monte-Carlo trial count");
  cmd->add_option("--ceiling", opts->ceiling, "exact-enumeration atom ceiling");
  cmd->add_option("--out", opts->out_path, "write the report document here");
}

ScenarioConfig load(const CommonOpts& opts) {
  if (!opts.config_path.empty() && !opts.scenario_name.empty()) {
    throw msdp::ConfigError("give either --config or --scenario, not both");
  }
  ScenarioConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = msdp::load_scenario_file(opts.config_path);
  } else if (!opts.scenario_name.empty()) {
    cfg = msdp::builtin_scenario(opts.scenario_name);
  } else {
    throw msdp::ConfigError("need --config PATH or --scenario NAME");
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.ceiling) cfg.ceiling = *opts.ceiling;
  return cfg;
}

void emit(const json& doc, const std::string& out_path) {
  std::string text = doc.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw msdp::ConfigError("cannot write " + out_path);
    out << text << "\n";
  }
}

int cmd_run(const CommonOpts& opts) {
  ScenarioConfig cfg = load(opts);
  msdp::Rng root(cfg.seed);
  msdp::Rng input_rng = root.split(0);
  msdp::Rng exec_rng = root.split(1);
  msdp::Sampler prior(cfg.prior);
  json outputs = json::array();
  double sum = 0, sumsq = 0;
  bool numeric = true;
  std::map<std::string, long> histogram;
  for (long t = 0; t < cfg.trials; ++t) {
    msdp::Value::List x(cfg.protocol.n);
    for (int i = 0; i < cfg.protocol.n; ++i) x[i] = prior.draw(input_rng);
    msdp::Transcript tr = msdp::execute(cfg.protocol, x, exec_rng);
    outputs.push_back(msdp::value_to_json(tr.z_out));
    ++histogram[tr.z_out.to_string()];
    if (tr.z_out.is_int()) {
      double z = static_cast<double>(tr.z_out.as_int());
      sum += z;
      sumsq += z * z;
    } else {
      numeric = false;
    }
  }
  json doc;
  doc["scenario"] = cfg.name;
  doc["seed"] = cfg.seed;
  doc["trials"] = cfg.trials;
  doc["outputs"] = outputs;
  json summary;
  summary["histogram"] = histogram;
  if (numeric && cfg.trials > 0) {
    double mean = sum / cfg.trials;
    summary["mean"] = mean;
    summary["stddev"] = std::sqrt(std::max(0.0, sumsq / cfg.trials - mean * mean));
  }
  doc["summary"] = summary;
  emit(doc, opts.out_path);
  return 0;
}

int cmd_transform(const CommonOpts& opts) {
  ScenarioConfig cfg = load(opts);
  msdp::TransformResult result = msdp::transform_protocol(
      cfg.protocol, cfg.eps, cfg.delta, cfg.beta, /*attested=*/false,
      cfg.ceiling, cfg.mutant);
  json doc;
  doc["scenario"] = cfg.name;
  doc["certified"] = result.was_certified;
  doc["budget"] = {{"n", result.budget.n},
                   {"ell", msdp::rat_to_string(result.budget.ell)},
                   {"v", result.budget.v},
                   {"m", result.budget.m},
                   {"beta", msdp::rat_to_string(result.budget.beta)}};
  json purification;
  if (result.model->purification_skipped()) {
    purification["status"] = "skipped";
  } else {
    purification["status"] = "solved";
    json per_user = json::array();
    for (int i = 0; i < result.reduced.n; ++i) {
      const msdp::PurifiedChannel& pc = result.model->purified(i);
      json u;
      u["user"] = i + 1;
      u["changed"] = pc.changed;
      u["ratio_bound"] = msdp::rat_to_string(pc.ratio_bound);
      json dists = json::array();
      for (const msdp::Rat& d : pc.distance_to_original) {
        dists.push_back(msdp::rat_to_string(d));
      }
      u["distance_to_original"] = dists;
      per_user.push_back(u);
    }
    purification["per_user"] = per_user;
  }
  doc["purification"] = purification;
  if (result.grouping) {
    json first = json::array(), second = json::array();
    for (int j = 0; j < result.grouping->first_half_end; ++j) {
      first.push_back(j + 1);
    }
    for (int j = result.grouping->first_half_end; j < result.grouping->k;
         ++j) {
      second.push_back(j + 1);
    }
    json bundled = json::array();
    for (const auto& [a, b] : result.grouping->bundled_edges) {
      bundled.push_back(json::array({a + 1, b + 1}));
    }
    doc["reduction"] = {{"first_half", first},
                        {"second_half", second},
                        {"bundled_edges", bundled}};
  }
  doc["claims"] = {
      {"internal_eps_factor",
       msdp::rat_to_string(result.claimed_eps.factor_lower())},
      {"internal_delta", msdp::rat_to_string(result.claimed_delta)},
      {"distance_bound",
       msdp::rat_to_string(msdp::Rat(cfg.protocol.n) * cfg.delta + cfg.beta)}};
  emit(doc, opts.out_path);
  return 0;
}

int cmd_audit(const CommonOpts& opts, const std::string& mode_name) {
  ScenarioConfig cfg = load(opts);
  msdp::AuditMode mode = msdp::AuditMode::kAuto;
  if (mode_name == "exact") mode = msdp::AuditMode::kExact;
  if (mode_name == "mc") mode = msdp::AuditMode::kMonteCarlo;
  std::vector<msdp::AuditReport> reports = msdp::run_audits(cfg, {}, mode);
  json doc;
  doc["scenario"] = cfg.name;
  doc["seed"] = cfg.seed;
  json arr = json::array();
  bool violated = false;
  for (const msdp::AuditReport& r : reports) {
    arr.push_back(msdp::audit_report_to_json(r));
    if (r.verdict == msdp::Verdict::kViolated) violated = true;
  }
  doc["audits"] = arr;
  doc["any_violation"] = violated;
  emit(doc, opts.out_path);
  return violated ? 1 : 0;
}

int cmd_report(const std::string& in_path, const std::string& scenario_name) {
  if (!scenario_name.empty()) {
    std::cout << msdp::builtin_scenario_text(scenario_name) << "\n";
    return 0;
  }
  if (in_path.empty()) {
    throw msdp::ConfigError("report needs --in PATH or --scenario NAME");
  }
  std::ifstream in(in_path);
  if (!in) throw msdp::ConfigError("cannot open " + in_path);
  json doc = json::parse(in);
  std::cout << "scenario: " << doc.value("scenario", std::string("?")) << "\n";
  if (doc.contains("audits")) {
    for (const json& a : doc.at("audits")) {
      std::cout << "  " << a.value("verdict", std::string("?")) << "  "
                << a.value("claim", std::string("?")) << " ("
                << a.value("mode", std::string("?")) << ")";
      if (a.contains("note")) std::cout << "  [" << a.at("note").get<std::string>() << "]";
      std::cout << "\n";
    }
    std::cout << (doc.value("any_violation", false) ? "result: VIOLATIONS"
                                                    : "result: all satisfied")
              << "\n";
  }
  if (doc.contains("summary")) {
    std::cout << "summary: " << doc.at("summary").dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator, transformer, and privacy auditor for "
               "non-interactive multi-server protocols"};
  app.require_subcommand(1);

  CommonOpts run_opts, transform_opts, audit_opts;
  std::string mode_name = "auto";
  std::string report_in, report_scenario;

  CLI::App* run = app.add_subcommand("run", "execute a protocol");
  add_common(run, &run_opts);
  CLI::App* transform =
      app.add_subcommand("transform", "compile a protocol into an online "
                                      "algorithm and report the budget");
  add_common(transform, &transform_opts);
  CLI::App* audit = app.add_subcommand("audit", "run privacy/accuracy audits");
  add_common(audit, &audit_opts);
  audit->add_option("--mode", mode_name, "exact|mc|auto");
  CLI::App* report = app.add_subcommand("report", "render a report document");
  report->add_option("--in", report_in, "report document path");
  report->add_option("--scenario", report_scenario,
                     "dump a built-in scenario document");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (transform->parsed()) return cmd_transform(transform_opts);
    if (audit->parsed()) return cmd_audit(audit_opts, mode_name);
    if (report->parsed()) return cmd_report(report_in, report_scenario);
  } catch (const msdp::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
