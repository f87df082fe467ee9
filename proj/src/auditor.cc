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

#include "msdp/auditor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace msdp {

using nlohmann::json;

namespace {

json rat_json(const Rat& r) { return rat_to_string(r); }

json verdict_json(Verdict v) { return verdict_name(v); }

std::vector<Value::List> all_input_vectors(const DomainPtr& X, int n) {
  std::vector<Value::List> out;
  Value::List x(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      out.push_back(x);
      return;
    }
    for (const Value& v : X->elements()) {
      x[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// Prepares the two-server simulation pieces for a scenario, reducing first
// when the protocol has more than two servers.
TwoServerModel scenario_model(const ScenarioConfig& cfg) {
  Protocol two = cfg.protocol.dag.k == 2 ? cfg.protocol
                                         : reduce_k_to_2(cfg.protocol);
  return TwoServerModel(std::move(two), cfg.eps, cfg.delta);
}

}  // namespace

json closeness_to_json(const ClosenessReport& report) {
  json out;
  out["delta_forward"] = rat_json(report.forward.delta_upper);
  out["delta_backward"] = rat_json(report.backward.delta_upper);
  out["delta_target"] = rat_json(report.delta);
  out["verdict"] = verdict_json(report.verdict);
  json ev = json::array();
  for (const Value& v : report.forward.witness_event) {
    ev.push_back(value_to_json(v));
    if (ev.size() >= 8) break;
  }
  out["witness_event_sample"] = ev;
  out["witness_event_size"] = report.forward.witness_size;
  return out;
}

FiniteDist empirical_from_samples(const std::vector<Value>& samples) {
  if (samples.empty()) throw ConfigError("empirical pmf needs samples");
  DistBuilder b;
  Rat w(1, static_cast<unsigned long>(samples.size()));
  for (const Value& v : samples) b.add(v, w);
  return b.build();
}

double chi_square_pvalue(double statistic, int degrees_of_freedom) {
  // Upper regularized incomplete gamma Q(k/2, x/2) via series/continued
  // fraction; standard Lentz/ series split at s+1.
  double a = degrees_of_freedom / 2.0;
  double x = statistic / 2.0;
  if (x <= 0) return 1.0;
  auto gammap_series = [](double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  };
  auto gammaq_cf = [](double a, double x) {
    double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 500; ++i) {
      double an = -i * (i - a);
      b += 2;
      d = an * d + b;
      if (std::fabs(d) < tiny) d = tiny;
      c = b + an / c;
      if (std::fabs(c) < tiny) c = tiny;
      d = 1 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  };
  if (x < a + 1) return 1.0 - gammap_series(a, x);
  return gammaq_cf(a, x);
}

namespace {

// ---------------------------------------------------------------------
// protocol-dp: exact multi-server DP certification; Monte-Carlo fallback
// uses plug-in empirical views with bootstrap intervals.

json attack_json(const Attack& a) {
  json out;
  json cu = json::array(), cs = json::array();
  for (int i : a.corrupt_users) cu.push_back(i + 1);
  for (int j : a.corrupt_servers) cs.push_back(j + 1);
  out["corrupt_users"] = cu;
  out["corrupt_servers"] = cs;
  return out;
}

json list_json(const Value::List& xs) {
  json out = json::array();
  for (const Value& v : xs) out.push_back(value_to_json(v));
  return out;
}

AuditReport protocol_dp_exact(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "protocol-dp";
  r.mode = "exact";
  ProtocolDpReport dp =
      check_protocol_dp(cfg.protocol, cfg.max_corrupt_servers, cfg.eps,
                        cfg.delta, cfg.ceiling);
  r.verdict = dp.verdict;
  r.parameters = {{"epsilon", cfg.eps.describe()},
                  {"delta", rat_json(cfg.delta)},
                  {"max_corrupt_servers", cfg.max_corrupt_servers}};
  r.measured["cells"] = dp.cells;
  r.measured["worst_excess"] = rat_json(dp.worst.report.max_delta_upper());
  r.witness["attack"] = attack_json(dp.worst.attack);
  r.witness["x"] = list_json(dp.worst.x);
  r.witness["x_alt"] = list_json(dp.worst.x_alt);
  r.witness["closeness"] = closeness_to_json(dp.worst.report);
  return r;
}

struct McCloseness {
  Rat point_forward;
  Rat point_backward;
  double upper = 0;  // bootstrap 99.5th percentile of max-direction excess
  double lower = 0;
};

Rat plugin_excess(const FiniteDist& p, const FiniteDist& q,
                  const Rat& factor) {
  Rat out(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    Rat e = p.weight(i) - factor * q.weight(i);
    if (e > 0) out += e;
  }
  return out;
}

McCloseness bootstrap_closeness(const std::vector<Value>& a,
                                const std::vector<Value>& b,
                                const Rat& factor, Rng& rng) {
  auto [pa, qa] = align_union(empirical_from_samples(a),
                              empirical_from_samples(b));
  McCloseness out;
  out.point_forward = plugin_excess(pa, qa, factor);
  out.point_backward = plugin_excess(qa, pa, factor);
  constexpr int kResamples = 200;
  std::vector<double> stats;
  stats.reserve(kResamples);
  for (int rpt = 0; rpt < kResamples; ++rpt) {
    std::vector<Value> ra, rb;
    ra.reserve(a.size());
    rb.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ra.push_back(a[rng.next_u64() % a.size()]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      rb.push_back(b[rng.next_u64() % b.size()]);
    }
    auto [rp, rq] = align_union(empirical_from_samples(ra),
                                empirical_from_samples(rb));
    Rat f = plugin_excess(rp, rq, factor);
    Rat g = plugin_excess(rq, rp, factor);
    stats.push_back(rat_to_double(f > g ? f : g));
  }
  std::sort(stats.begin(), stats.end());
  out.lower = stats[static_cast<std::size_t>(0.005 * (kResamples - 1))];
  out.upper = stats[static_cast<std::size_t>(0.995 * (kResamples - 1))];
  return out;
}

AuditReport protocol_dp_mc(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "protocol-dp";
  r.mode = "monte-carlo";
  r.note = "atom ceiling exceeded; plug-in empirical views with bootstrap";
  if (cfg.protocol.n > 6 || cfg.protocol.dag.k > 4) {
    throw SizeCeilingError(std::size_t{1} << cfg.protocol.n, cfg.ceiling);
  }
  long trials = std::min(cfg.trials, 20000L);
  Rng root(cfg.seed);
  const DomainPtr& X = cfg.protocol.input_domain();
  auto inputs = all_input_vectors(X, cfg.protocol.n);
  Verdict verdict = Verdict::kSatisfied;
  double worst_point = 0;
  std::uint64_t stream = 0;
  for (std::uint64_t smask = 0;
       smask < (1ULL << cfg.protocol.dag.k); ++smask) {
    Attack attack;
    for (int j = 0; j < cfg.protocol.dag.k; ++j) {
      if (smask & (1ULL << j)) attack.corrupt_servers.push_back(j);
    }
    if (static_cast<int>(attack.corrupt_servers.size()) >
        cfg.max_corrupt_servers) {
      continue;
    }
    ViewSpec spec = ViewSpec::make(cfg.protocol, attack);
    std::map<Value::List, std::vector<Value>> samples;
    for (const auto& x : inputs) {
      Rng rng = root.split(stream++);
      std::vector<Value> views;
      views.reserve(trials);
      for (long t = 0; t < trials; ++t) {
        Transcript tr = execute(cfg.protocol, x, rng);
        views.push_back(spec.project(tr, x));
      }
      samples.emplace(x, std::move(views));
    }
    for (const auto& x : inputs) {
      for (int i = 0; i < cfg.protocol.n; ++i) {
        for (const Value& alt : X->elements()) {
          if (!(x[i] < alt)) continue;
          Value::List x2 = x;
          x2[i] = alt;
          Rng brng = root.split(stream++);
          McCloseness mc = bootstrap_closeness(
              samples.at(x), samples.at(x2), cfg.eps.factor_lower(), brng);
          double point = rat_to_double(
              mc.point_forward > mc.point_backward ? mc.point_forward
                                                   : mc.point_backward);
          worst_point = std::max(worst_point, point);
          double target = rat_to_double(cfg.delta);
          if (mc.lower > target) {
            verdict = Verdict::kViolated;
          } else if (mc.upper > target && verdict == Verdict::kSatisfied) {
            verdict = Verdict::kIndeterminate;
          }
        }
      }
    }
  }
  r.verdict = verdict;
  r.measured["trials"] = trials;
  r.measured["worst_plugin_excess"] = worst_point;
  return r;
}

// ---------------------------------------------------------------------
// subset-privacy: every randomizer marginal of at most ceil(k/2)
// coordinates is (eps, delta)-close across input pairs.

AuditReport subset_privacy(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "subset-privacy";
  r.mode = "exact";
  int k = cfg.protocol.dag.k;
  int half = std::min(cfg.max_corrupt_servers, (k + 1) / 2);
  Verdict verdict = Verdict::kSatisfied;
  Rat worst(0);
  json worst_witness;
  for (int user = 0; user < cfg.protocol.n; ++user) {
    const Randomizer& rand = cfg.protocol.randomizers[user];
    for (std::uint64_t mask = 1; mask < (1ULL << k); ++mask) {
      std::vector<std::size_t> coords;
      for (int j = 0; j < k; ++j) {
        if (mask & (1ULL << j)) coords.push_back(j);
      }
      if (static_cast<int>(coords.size()) > half) continue;
      Randomizer marg = rand.marginal(coords);
      const DomainPtr& X = rand.input_domain();
      for (std::size_t a = 0; a < X->size(); ++a) {
        for (std::size_t b = a + 1; b < X->size(); ++b) {
          auto [p, q] = align_union(
              marg.channel_by_index(a).as_tuple_dist(),
              marg.channel_by_index(b).as_tuple_dist());
          ClosenessReport cr = check_closeness(p, q, cfg.eps, cfg.delta);
          if (cr.verdict == Verdict::kViolated) verdict = Verdict::kViolated;
          if (cr.verdict == Verdict::kIndeterminate &&
              verdict == Verdict::kSatisfied) {
            verdict = Verdict::kIndeterminate;
          }
          if (cr.max_delta_upper() > worst) {
            worst = cr.max_delta_upper();
            worst_witness = {{"user", user + 1},
                             {"subset_mask", mask},
                             {"closeness", closeness_to_json(cr)}};
          }
        }
      }
    }
  }
  r.verdict = verdict;
  r.measured["worst_excess"] = rat_json(worst);
  r.witness = worst_witness;
  return r;
}

// ---------------------------------------------------------------------
// m2-equals-m1: exact distributional identity of the re-sampling
// thought experiment and the purified hybrid.

AuditReport m2_equals_m1(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "m2-equals-m1";
  r.mode = "exact";
  TwoServerModel model = scenario_model(cfg);
  FiniteDist m1 = m1_output_distribution(model, cfg.prior, cfg.ceiling);
  FiniteDist m2 = m2_output_distribution(model, cfg.prior, cfg.ceiling);
  auto [p, q] = align_union(m1, m2);
  Rat sd = statistical_distance(p, q);
  r.verdict = sd == 0 ? Verdict::kSatisfied : Verdict::kViolated;
  r.measured["statistical_distance"] = rat_json(sd);
  r.parameters["n"] = cfg.protocol.n;
  return r;
}

// ---------------------------------------------------------------------
// rejection-posterior: the accepted-sample law from the rate formula
// equals the Bayes posterior, for every reachable (user, first message).

AuditReport rejection_posterior(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "rejection-posterior";
  r.mode = "exact";
  TwoServerModel model = scenario_model(cfg);
  auto cells = enumerate_acceptance(model, cfg.prior, cfg.mutant);
  r.verdict = Verdict::kSatisfied;
  std::size_t checked = 0;
  for (const AcceptanceCell& cell : cells) {
    ++checked;
    if (!(cell.accepted_dist == cell.posterior_dist)) {
      r.verdict = Verdict::kViolated;
      r.witness = {{"user", cell.user + 1},
                   {"y1", value_to_json(cell.y1)}};
      break;
    }
  }
  r.measured["cells"] = checked;
  return r;
}

// ---------------------------------------------------------------------
// accept-rate-bounds: every reachable rate lies in (0, 1/2] and every
// prior mixture within [1/(2 e^{2 eps}), 1/2].

AuditReport accept_rate_bounds(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "accept-rate-bounds";
  r.mode = "exact";
  TwoServerModel model = scenario_model(cfg);
  auto cells = enumerate_acceptance(model, cfg.prior, cfg.mutant);
  Rat half(1, 2);
  Rat claim_floor =
      Rat(1) / (2 * cfg.eps.factor_lower() * cfg.eps.factor_lower());
  Rat min_rate(1), max_rate(0), min_mix(1), max_mix(0);
  r.verdict = Verdict::kSatisfied;
  for (const AcceptanceCell& cell : cells) {
    for (const Rat& rate : cell.rates) {
      if (rate < min_rate) min_rate = rate;
      if (rate > max_rate) max_rate = rate;
      if (!(rate > 0) || rate > half) {
        r.verdict = Verdict::kViolated;
        r.witness = {{"user", cell.user + 1},
                     {"y1", value_to_json(cell.y1)},
                     {"rate", rat_json(rate)}};
      }
    }
    if (cell.mixture_rate < min_mix) min_mix = cell.mixture_rate;
    if (cell.mixture_rate > max_mix) max_mix = cell.mixture_rate;
    if (cell.mixture_rate < claim_floor || cell.mixture_rate > half) {
      r.verdict = Verdict::kViolated;
      r.witness = {{"user", cell.user + 1},
                   {"y1", value_to_json(cell.y1)},
                   {"mixture", rat_json(cell.mixture_rate)}};
    }
  }
  r.parameters["rate_floor"] = rat_json(claim_floor);
  r.measured = {{"min_rate", rat_json(min_rate)},
                {"max_rate", rat_json(max_rate)},
                {"min_mixture", rat_json(min_mix)},
                {"max_mixture", rat_json(max_mix)},
                {"cells", cells.size()}};
  return r;
}

// ---------------------------------------------------------------------
// transform-distance: SD(Pi(D^n), A_Pi(D^m)) <= n delta + beta.

AuditReport transform_distance_exact(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "transform-distance";
  r.mode = "exact";
  TwoServerModel model = scenario_model(cfg);
  TransformBudget budget = sample_budget(cfg.protocol.n, cfg.eps, cfg.beta);
  FiniteDist pi = output_distribution(cfg.protocol, cfg.prior, cfg.ceiling);
  M3OutputResult m3 = m3_output_distribution(model, cfg.prior, budget.v,
                                             cfg.ceiling, cfg.mutant);
  auto [p, q] = align_union(pi, m3.output);
  Rat sd = statistical_distance(p, q);
  Rat bound = Rat(cfg.protocol.n) * cfg.delta + cfg.beta;
  r.verdict = sd <= bound ? Verdict::kSatisfied : Verdict::kViolated;
  r.parameters = {{"n", cfg.protocol.n},
                  {"beta", rat_json(cfg.beta)},
                  {"delta", rat_json(cfg.delta)},
                  {"budget_v", budget.v},
                  {"budget_m", budget.m},
                  {"ell", rat_json(budget.ell)}};
  r.measured = {{"statistical_distance", rat_json(sd)},
                {"bound", rat_json(bound)},
                {"truncation_mass", rat_json(m3.truncation_mass)},
                {"truncation_mass_approx", rat_to_double(m3.truncation_mass)}};
  return r;
}

AuditReport transform_distance_mc(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "transform-distance";
  r.mode = "monte-carlo";
  r.note = "plug-in statistical distance with bootstrap interval";
  TwoServerModel model = scenario_model(cfg);
  TransformBudget budget = sample_budget(cfg.protocol.n, cfg.eps, cfg.beta);
  OnlineAlgorithm alg = build_m3(model, budget, cfg.mutant);
  long trials = std::min(cfg.trials, 2000L);
  Rng root(cfg.seed);
  Rng proto_rng = root.split(1);
  Rng alg_rng = root.split(2);
  Rng stream_rng = root.split(3);
  Rng boot_rng = root.split(4);
  Sampler prior_sampler(cfg.prior);
  std::vector<Value> a, b;
  for (long t = 0; t < trials; ++t) {
    Value::List x(cfg.protocol.n);
    for (int i = 0; i < cfg.protocol.n; ++i) {
      x[i] = prior_sampler.draw(proto_rng);
    }
    a.push_back(execute(cfg.protocol, x, proto_rng).z_out);
    Value::List stream(budget.m);
    for (long i = 0; i < budget.m; ++i) {
      stream[i] = prior_sampler.draw(stream_rng);
    }
    b.push_back(
        run_online(alg, stream, alg_rng, /*keep_snapshots=*/false).output);
  }
  auto [p, q] = align_union(empirical_from_samples(a),
                            empirical_from_samples(b));
  Rat sd_point = statistical_distance(p, q);
  constexpr int kResamples = 200;
  std::vector<double> stats;
  for (int rpt = 0; rpt < kResamples; ++rpt) {
    std::vector<Value> ra, rb;
    for (long i = 0; i < trials; ++i) {
      ra.push_back(a[boot_rng.next_u64() % a.size()]);
      rb.push_back(b[boot_rng.next_u64() % b.size()]);
    }
    auto [rp, rq] = align_union(empirical_from_samples(ra),
                                empirical_from_samples(rb));
    stats.push_back(rat_to_double(statistical_distance(rp, rq)));
  }
  std::sort(stats.begin(), stats.end());
  double hi = stats[static_cast<std::size_t>(0.995 * (kResamples - 1))];
  Rat bound = Rat(cfg.protocol.n) * cfg.delta + cfg.beta;
  // Plug-in SD over-estimates on finite samples; compare the bootstrap
  // spread against the bound plus the sampling noise floor.
  double noise_floor = hi - stats[kResamples / 2];
  double target = rat_to_double(bound);
  double point = rat_to_double(sd_point);
  r.verdict = (point - 2 * noise_floor <= target) ? Verdict::kSatisfied
                                                  : Verdict::kViolated;
  r.measured = {{"trials", trials},
                {"plugin_sd", point},
                {"bootstrap_upper", hi},
                {"bound", target}};
  return r;
}

// ---------------------------------------------------------------------
// internal-privacy: exhaustive (pair, t) audit of the compiled algorithm
// at audit scale; first-batch pairs against the pure 2-eps claim, all
// pairs against (7 eps, 3 e^{5 eps} delta).

AuditReport internal_privacy(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "internal-privacy";
  r.mode = "exact";
  TwoServerModel model = scenario_model(cfg);
  TransformBudget budget = sample_budget(cfg.protocol.n, cfg.eps, cfg.beta);
  long audit_m = cfg.effective_audit_stream_length();
  TransformBudget audit_budget = budget_with_stream_length(budget, audit_m);
  OnlineAlgorithm alg = build_m3(model, audit_budget, cfg.mutant);

  Eps claim_eps = cfg.eps.pow(7);
  Rat claim_delta = 3 * cfg.eps.pow(5).factor_lower() * cfg.delta;
  InternalPrivacyOptions opts;
  opts.ceiling = cfg.ceiling;
  InternalPrivacyReport full =
      check_internal_privacy(alg, claim_eps, claim_delta, opts);

  InternalPrivacyOptions first_opts = opts;
  first_opts.max_differing_index = cfg.protocol.n;
  InternalPrivacyReport first =
      check_internal_privacy(alg, cfg.eps.pow(2), Rat(0), first_opts);

  bool erasure_ok = true;
  std::string erasure_note;
  try {
    auto inputs = all_input_vectors(alg.input_domain(),
                                    alg.stream_length());
    // Full stream space only at desk scale; otherwise spot-check.
    std::size_t limit = 64;
    for (std::size_t i = 0; i < inputs.size() && i < limit; ++i) {
      verify_m3_erasure(alg, inputs[i], cfg.ceiling);
    }
  } catch (const InternalError& e) {
    erasure_ok = false;
    erasure_note = e.what();
  }

  Verdict verdict = Verdict::kSatisfied;
  for (Verdict v : {full.verdict, first.verdict}) {
    if (v == Verdict::kViolated) verdict = Verdict::kViolated;
    if (v == Verdict::kIndeterminate && verdict == Verdict::kSatisfied) {
      verdict = Verdict::kIndeterminate;
    }
  }
  if (!erasure_ok) {
    verdict = Verdict::kViolated;
    r.note = "erasure discipline violated: " + erasure_note;
  }
  r.verdict = verdict;
  r.parameters = {{"claimed_eps_factor", rat_json(claim_eps.factor_lower())},
                  {"claimed_delta", rat_json(claim_delta)},
                  {"first_batch_eps_factor",
                   rat_json(cfg.eps.pow(2).factor_lower())},
                  {"audit_stream_length", audit_m},
                  {"budget_m", budget.m}};
  r.measured = {{"cells", full.cells},
                {"worst_excess", rat_json(full.worst.report.max_delta_upper())},
                {"first_batch_cells", first.cells},
                {"first_batch_worst_excess",
                 rat_json(first.worst.report.max_delta_upper())}};
  r.witness = {{"time", full.worst.time},
               {"differing_index", full.worst.differing_index},
               {"stream", list_json(full.worst.stream)},
               {"stream_alt", list_json(full.worst.stream_alt)},
               {"closeness", closeness_to_json(full.worst.report)}};
  return r;
}

// ---------------------------------------------------------------------
// reduction-fidelity: the half-split reduction preserves output
// distributions exactly, and a corrupted-server view of the reduced
// protocol is the bundling projection of the matching original view.

AuditReport reduction_fidelity(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "reduction-fidelity";
  r.mode = "exact";
  if (cfg.protocol.dag.k < 3) {
    r.verdict = Verdict::kSatisfied;
    r.note = "two-server protocol; reduction is the identity";
    return r;
  }
  Protocol reduced = reduce_k_to_2(cfg.protocol);
  auto inputs = all_input_vectors(cfg.protocol.input_domain(),
                                  cfg.protocol.n);
  r.verdict = Verdict::kSatisfied;
  Rat worst(0);
  for (const auto& x : inputs) {
    FiniteDist a = output_distribution(cfg.protocol, x, cfg.ceiling);
    FiniteDist b = output_distribution(reduced, x, cfg.ceiling);
    auto [p, q] = align_union(a, b);
    Rat sd = statistical_distance(p, q);
    if (sd > worst) worst = sd;
    if (sd != 0) {
      r.verdict = Verdict::kViolated;
      r.witness = {{"x", list_json(x)}, {"sd", rat_json(sd)}};
    }
  }
  // View correspondence for single-server reduced attacks.
  for (int corrupt = 0; corrupt < 2 && r.verdict == Verdict::kSatisfied;
       ++corrupt) {
    Attack reduced_attack;
    reduced_attack.corrupt_servers = {corrupt};
    Attack original_attack = lift_reduced_attack(cfg.protocol, reduced_attack);
    ViewSpec reduced_spec = ViewSpec::make(reduced, reduced_attack);
    for (const auto& x : inputs) {
      DistBuilder pushed;
      enumerate_transcripts(
          cfg.protocol, x, cfg.ceiling,
          [&](const Transcript& t, const Rat& w) {
            pushed.add(
                reduced_spec.project(reduce_transcript(cfg.protocol, t), x),
                w);
          });
      FiniteDist lhs = pushed.build();
      FiniteDist rhs = view_distribution(reduced, reduced_attack, x,
                                         cfg.ceiling);
      if (!(lhs == rhs)) {
        r.verdict = Verdict::kViolated;
        r.witness = {{"x", list_json(x)},
                     {"reduced_corrupt_server", corrupt + 1}};
        break;
      }
    }
    (void)original_attack;
  }
  r.measured["worst_output_sd"] = rat_json(worst);
  r.measured["inputs_checked"] = inputs.size();
  return r;
}

// ---------------------------------------------------------------------
// geo-tail: Monte-Carlo validation of the geometric-convolution budget.

long sample_geometric(double p, Rng& rng) {
  long draws = 1;
  while (rng.next_double() >= p) ++draws;
  return draws;
}

AuditReport geo_tail_with(const std::vector<Rat>& rates, int n,
                          const Rat& ell, const Rat& beta, long trials,
                          std::uint64_t seed) {
  AuditReport r;
  r.claim = "geo-tail";
  r.mode = "monte-carlo";
  TransformBudget budget = budget_with_ell(n, ell, beta);
  Rng rng(seed);
  std::vector<double> pd;
  for (const Rat& p : rates) pd.push_back(rat_to_double(p));
  long exceed = 0;
  for (long t = 0; t < trials; ++t) {
    long total = 0;
    for (double p : pd) total += sample_geometric(p, rng);
    if (total > budget.v) ++exceed;
  }
  double freq = static_cast<double>(exceed) / trials;
  double beta_d = rat_to_double(beta);
  double slack = 3.0 * std::sqrt(beta_d * (1 - beta_d) / trials);
  r.verdict =
      freq <= beta_d + slack ? Verdict::kSatisfied : Verdict::kViolated;
  r.parameters = {{"n", n},
                  {"ell", rat_json(ell)},
                  {"beta", rat_json(beta)},
                  {"v", budget.v},
                  {"trials", trials}};
  r.measured = {{"exceedance_frequency", freq},
                {"threshold", beta_d + slack}};
  return r;
}

AuditReport geo_tail(const ScenarioConfig& cfg) {
  TwoServerModel model = scenario_model(cfg);
  TransformBudget budget = sample_budget(cfg.protocol.n, cfg.eps, cfg.beta);
  // Worst-case waiting times: the smallest mixture rate per user over
  // reachable first messages.
  auto cells = enumerate_acceptance(model, cfg.prior, cfg.mutant);
  std::vector<Rat> rates(cfg.protocol.n, Rat(1, 2));
  for (const AcceptanceCell& cell : cells) {
    if (cell.mixture_rate < rates[cell.user]) {
      rates[cell.user] = cell.mixture_rate;
    }
  }
  long trials = std::max(cfg.trials, 1000L);
  AuditReport r =
      geo_tail_with(rates, cfg.protocol.n, budget.ell, cfg.beta,
                    std::min(trials, 100000L), cfg.seed);
  r.note = "rates derived from the protocol's acceptance mixtures";
  return r;
}

// ---------------------------------------------------------------------
// counting audits.

const CountingParams& require_counting(const ScenarioConfig& cfg) {
  if (!cfg.counting) {
    throw ConfigError("audit requires a counting scenario");
  }
  return *cfg.counting;
}

std::vector<int> default_counting_inputs(int n) {
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) x[i] = i % 2;
  return x;
}

AuditReport counting_privacy(const ScenarioConfig& cfg) {
  AuditReport r = protocol_dp_exact(cfg);
  r.claim = "counting-privacy";
  const CountingParams& params = require_counting(cfg);
  r.parameters["t"] = params.t;
  r.parameters["n"] = params.n;
  return r;
}

AuditReport counting_unbiased(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "counting-unbiased";
  r.mode = "monte-carlo";
  const CountingParams& params = require_counting(cfg);
  std::vector<int> x = default_counting_inputs(params.n);
  long sum_x = 0;
  for (int v : x) sum_x += v;
  // Exact route: the honest shares cancel, so E[z_out] - sum(x) equals the
  // noise-mean offset 2 E[alpha] - t (t * pmf(t) over the {1..t} support);
  // it must sit inside the Monte-Carlo tolerance for the mean test to be
  // meaningful.
  Rat exact_mean = counting_expected_output(params, x, {});
  Rat exact_bias = exact_mean - Rat(sum_x);
  FiniteDist noise = dt_pmf(params.t, params.noise_eps);
  Rat noise_mean = noise.expectation_int();
  Rat second(0);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    long v = static_cast<long>(noise.domain()->at(i).as_int());
    second += noise.weight(i) * v * v;
  }
  double var_z = 2.0 * rat_to_double(second - noise_mean * noise_mean);
  Rng rng(cfg.seed);
  long trials = cfg.trials;
  CountingRunner runner(params);
  double sum = 0, sumsq = 0;
  for (long t = 0; t < trials; ++t) {
    double z = static_cast<double>(runner.run(x, {}, rng));
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / trials;
  double var = std::max(0.0, sumsq / trials - mean * mean);
  double tol = 3.0 * std::sqrt(var / trials);
  bool exact_ok =
      std::fabs(rat_to_double(exact_bias)) <= 3.0 * std::sqrt(var_z / trials);
  bool mc_ok = std::fabs(mean - sum_x) <= tol;
  r.verdict = (exact_ok && mc_ok) ? Verdict::kSatisfied : Verdict::kViolated;
  r.parameters = {{"n", params.n}, {"t", params.t}, {"trials", trials}};
  r.measured = {{"exact_mean", rat_json(exact_mean)},
                {"exact_noise_offset", rat_json(exact_bias)},
                {"true_count", sum_x},
                {"mc_mean", mean},
                {"mc_tolerance", tol}};
  return r;
}

AuditReport counting_error_p90(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "counting-error-p90";
  r.mode = "exact";
  const CountingParams& params = require_counting(cfg);
  Rat q = counting_error_quantile(params.t, params.noise_eps, Rat(9, 10));
  Rat bound = Rat(10) / params.epsilon;
  r.verdict = q <= bound ? Verdict::kSatisfied : Verdict::kViolated;
  r.parameters = {{"t", params.t}, {"bound", rat_json(bound)}};
  r.measured = {{"p90_noise_error", rat_json(q)},
                {"reference_constant",
                 rat_json(q * params.epsilon)}};
  return r;
}

AuditReport counting_robustness(const ScenarioConfig& cfg) {
  AuditReport r;
  r.claim = "counting-robustness";
  r.mode = "exact";
  const CountingParams& params = require_counting(cfg);
  std::vector<int> x = default_counting_inputs(params.n);
  // Baseline: user 1 contributes nothing (in-range zero shares); the noise
  // terms cancel exactly in every difference below.
  MaliciousUser silent{0, 0, 0};
  Rat baseline = counting_expected_output(params, x, {silent});
  // Extreme in-range message pair.
  MaliciousUser extreme{0, params.t + 1, 0};
  Rat bias =
      counting_expected_output(params, x, {extreme}) - baseline;
  Rat bound = Rat(2) * (params.t + 1);
  bool in_range_ok = rat_abs(bias) <= bound;
  // Out-of-range values are clamped away entirely: zero influence.
  MaliciousUser wild{0, 1000000000LL, -1000000000LL};
  Rat wild_bias =
      counting_expected_output(params, x, {wild}) - baseline;
  bool wild_ok = wild_bias == 0;
  r.verdict =
      (in_range_ok && wild_ok) ? Verdict::kSatisfied : Verdict::kViolated;
  r.parameters = {{"t", params.t}, {"bias_bound", rat_json(bound)}};
  r.measured = {{"in_range_bias", rat_json(bias)},
                {"out_of_range_bias", rat_json(wild_bias)}};
  return r;
}

// ---------------------------------------------------------------------

using AuditFn = std::function<AuditReport(const ScenarioConfig&, AuditMode)>;

AuditReport with_mc_fallback(const ScenarioConfig& cfg, AuditMode mode,
                             const std::function<AuditReport()>& exact,
                             const std::function<AuditReport()>& mc) {
  if (mode == AuditMode::kMonteCarlo) return mc();
  if (mode == AuditMode::kExact) return exact();
  try {
    return exact();
  } catch (const SizeCeilingError& e) {
    AuditReport r = mc();
    r.note = std::string("downgraded to Monte-Carlo: ") + e.what();
    return r;
  }
}

const std::map<std::string, AuditFn>& audit_registry() {
  static const std::map<std::string, AuditFn> kRegistry = {
      {"protocol-dp",
       [](const ScenarioConfig& cfg, AuditMode mode) {
         return with_mc_fallback(
             cfg, mode, [&] { return protocol_dp_exact(cfg); },
             [&] { return protocol_dp_mc(cfg); });
       }},
      {"subset-privacy",
       [](const ScenarioConfig& cfg, AuditMode) {
         return subset_privacy(cfg);
       }},
      {"m2-equals-m1",
       [](const ScenarioConfig& cfg, AuditMode) { return m2_equals_m1(cfg); }},
      {"rejection-posterior",
       [](const ScenarioConfig& cfg, AuditMode) {
         return rejection_posterior(cfg);
       }},
      {"accept-rate-bounds",
       [](const ScenarioConfig& cfg, AuditMode) {
         return accept_rate_bounds(cfg);
       }},
      {"transform-distance",
       [](const ScenarioConfig& cfg, AuditMode mode) {
         return with_mc_fallback(
             cfg, mode, [&] { return transform_distance_exact(cfg); },
             [&] { return transform_distance_mc(cfg); });
       }},
      {"internal-privacy",
       [](const ScenarioConfig& cfg, AuditMode) {
         return internal_privacy(cfg);
       }},
      {"reduction-fidelity",
       [](const ScenarioConfig& cfg, AuditMode) {
         return reduction_fidelity(cfg);
       }},
      {"geo-tail",
       [](const ScenarioConfig& cfg, AuditMode) { return geo_tail(cfg); }},
      {"counting-privacy",
       [](const ScenarioConfig& cfg, AuditMode) {
         return counting_privacy(cfg);
       }},
      {"counting-unbiased",
       [](const ScenarioConfig& cfg, AuditMode) {
         return counting_unbiased(cfg);
       }},
      {"counting-error-p90",
       [](const ScenarioConfig& cfg, AuditMode) {
         return counting_error_p90(cfg);
       }},
      {"counting-robustness",
       [](const ScenarioConfig& cfg, AuditMode) {
         return counting_robustness(cfg);
       }},
  };
  return kRegistry;
}

}  // namespace

const std::vector<std::string>& audit_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& [name, fn] : audit_registry()) names.push_back(name);
    return names;
  }();
  return kNames;
}

AuditReport run_audit(const ScenarioConfig& cfg, const std::string& name,
                      AuditMode mode) {
  auto it = audit_registry().find(name);
  if (it == audit_registry().end()) {
    throw ConfigError("unknown audit '" + name + "'");
  }
  return it->second(cfg, mode);
}

std::vector<AuditReport> run_audits(const ScenarioConfig& cfg,
                                    const std::vector<std::string>& selected,
                                    AuditMode mode) {
  std::vector<std::string> names = selected;
  if (names.empty()) names = cfg.audits;
  std::vector<AuditReport> out;
  for (const std::string& name : names) {
    out.push_back(run_audit(cfg, name, mode));
  }
  return out;
}

nlohmann::json audit_report_to_json(const AuditReport& report) {
  json out;
  out["claim"] = report.claim;
  out["mode"] = report.mode;
  out["verdict"] = verdict_name(report.verdict);
  out["parameters"] = report.parameters;
  out["measured"] = report.measured;
  out["witness"] = report.witness;
  if (!report.note.empty()) out["note"] = report.note;
  return out;
}

AuditReport audit_geo_tail_explicit(int n, const Rat& ell, const Rat& beta,
                                    long trials, std::uint64_t seed) {
  std::vector<Rat> rates(n, ell);
  return geo_tail_with(rates, n, ell, beta, trials, seed);
}

}  // namespace msdp
