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

#include "msdp/counting.h"

#include <cmath>

namespace msdp {

FiniteDist dt_pmf(int t, const Eps& noise_eps) {
  if (t < 1) throw ConfigError("dt_pmf needs t >= 1");
  if (t % 2 != 0) {
    // Even t keeps t/2 integral, the mode a single point, and quantile
    // arithmetic exact.
    throw ConfigError("dt_pmf requires even t");
  }
  // base = e^{-eps}; drift from directed rounding is below 2^-184 relative,
  // certified by construction of the Eps bounds.
  Rat base = Rat(1) / noise_eps.factor_upper();
  std::vector<Rat> weights;
  weights.reserve(t);
  Rat total(0);
  for (int v = 1; v <= t; ++v) {
    unsigned dist = static_cast<unsigned>(std::labs(t / 2 - v));
    Rat w = rat_pow(base, dist);
    weights.push_back(w);
    total += w;
  }
  for (Rat& w : weights) w /= total;
  return FiniteDist(Domain::ints(1, t), std::move(weights));
}

int choose_t(double epsilon, double delta) {
  if (!(epsilon > 0)) throw ConfigError("choose_t needs epsilon > 0");
  if (!(delta > 0) || !(delta < 1)) throw ConfigError("choose_t needs delta in (0,1)");
  double raw = std::log(2.0 / delta) / epsilon;
  int t = 2 * static_cast<int>(std::ceil(raw - 1e-12));
  return t < 2 ? 2 : t;
}

CountingParams make_counting_params(int n, const Rat& epsilon,
                                    const Rat& delta) {
  if (n < 0) throw ConfigError("counting needs n >= 0");
  if (!(epsilon > 0)) throw ConfigError("counting needs epsilon > 0");
  if (!(delta > 0) || delta >= epsilon) {
    throw ConfigError("counting expects 0 < delta < epsilon");
  }
  CountingParams params;
  params.n = n;
  params.epsilon = epsilon;
  params.delta = delta;
  Rat half_eps = epsilon / 2;
  // 96 bits keeps table entries compact; the rounding drift is ~2^-90,
  // far inside the certified 1e-15 budget.
  params.noise_eps = Eps::from_exponent(half_eps, 96);
  params.t = choose_t(rat_to_double(half_eps), rat_to_double(delta / 2));
  return params;
}

Randomizer counting_randomizer(int t, const Eps& noise_eps) {
  FiniteDist noise = dt_pmf(t, noise_eps);
  DomainPtr y1_dom = Domain::ints(1, t + 1);
  DomainPtr y2_dom = Domain::ints(1, t);
  DomainPtr bits = Domain::bits();
  std::vector<JointDist> channel;
  for (int x = 0; x <= 1; ++x) {
    std::vector<std::pair<Value::List, Rat>> atoms;
    for (int eta = 1; eta <= t; ++eta) {
      atoms.push_back({{Value(x + eta), Value(eta)},
                       noise.prob_of(Value(eta))});
    }
    channel.push_back(JointDist::from_atoms({y1_dom, y2_dom}, atoms));
  }
  return Randomizer(bits, std::move(channel));
}

ServerAlg counting_server1(int t, const Eps& noise_eps) {
  LinearServerSpec spec;
  spec.user_sign = 1;
  spec.server_sign = 0;
  spec.user_clamp = {{0, t + 1}};
  spec.noise = dt_pmf(t, noise_eps);
  spec.offset = 0;
  return linear_server(std::move(spec));
}

ServerAlg counting_server2(int t, const Eps& noise_eps) {
  LinearServerSpec spec;
  spec.user_sign = -1;
  spec.server_sign = 1;
  spec.user_clamp = {{0, t + 1}};
  spec.noise = dt_pmf(t, noise_eps);
  spec.offset = -t;
  return linear_server(std::move(spec));
}

Protocol counting_protocol(const CountingParams& params) {
  Protocol p;
  p.n = params.n;
  p.dag.k = 2;
  p.dag.edges = {{0, 1}};
  Randomizer r = counting_randomizer(params.t, params.noise_eps);
  p.randomizers.assign(params.n, r);
  p.servers.push_back(counting_server1(params.t, params.noise_eps));
  p.servers.push_back(counting_server2(params.t, params.noise_eps));
  p.validate();
  return p;
}

std::int64_t clamped_sum(const std::vector<std::int64_t>& msgs, int t) {
  std::int64_t sum = 0;
  for (std::int64_t m : msgs) {
    if (m >= 0 && m <= t + 1) sum += m;
  }
  return sum;
}

CountingRunner::CountingRunner(const CountingParams& params)
    : params_(params),
      noise_(dt_pmf(params.t, params.noise_eps)),
      sampler_(noise_) {}

std::int64_t CountingRunner::run(const std::vector<int>& x,
                                 const std::vector<MaliciousUser>& malicious,
                                 Rng& rng) const {
  if (static_cast<int>(x.size()) != params_.n) {
    throw ConfigError("input vector length does not match n");
  }
  std::vector<std::int64_t> y1(params_.n), y2(params_.n);
  for (int i = 0; i < params_.n; ++i) {
    std::int64_t eta = sampler_.draw(rng).as_int();
    y1[i] = x[i] + eta;
    y2[i] = eta;
  }
  for (const MaliciousUser& mu : malicious) {
    if (mu.index < 0 || mu.index >= params_.n) {
      throw ConfigError("malicious user index out of range");
    }
    y1[mu.index] = mu.y1;
    y2[mu.index] = mu.y2;
  }
  std::int64_t alpha1 = sampler_.draw(rng).as_int();
  std::int64_t alpha2 = sampler_.draw(rng).as_int();
  std::int64_t z = alpha1 + clamped_sum(y1, params_.t);
  return z + alpha2 - params_.t - clamped_sum(y2, params_.t);
}

std::int64_t run_counting_once(const CountingParams& params,
                               const std::vector<int>& x,
                               const std::vector<MaliciousUser>& malicious,
                               Rng& rng) {
  return CountingRunner(params).run(x, malicious, rng);
}

Rat counting_expected_output(const CountingParams& params,
                             const std::vector<int>& x,
                             const std::vector<MaliciousUser>& malicious) {
  FiniteDist noise = dt_pmf(params.t, params.noise_eps);
  Rat noise_mean = noise.expectation_int();
  std::vector<bool> is_malicious(params.n, false);
  Rat total = 2 * noise_mean - params.t;  // alpha1 + alpha2 - t
  for (const MaliciousUser& mu : malicious) {
    is_malicious[mu.index] = true;
    std::int64_t c1 =
        (mu.y1 >= 0 && mu.y1 <= params.t + 1) ? mu.y1 : 0;
    std::int64_t c2 =
        (mu.y2 >= 0 && mu.y2 <= params.t + 1) ? mu.y2 : 0;
    total += Rat(static_cast<long>(c1 - c2));
  }
  for (int i = 0; i < params.n; ++i) {
    // Honest shares are always in range, so their noise cancels exactly.
    if (!is_malicious[i]) total += x[i];
  }
  return total;
}

Rat counting_error_quantile(int t, const Eps& noise_eps, const Rat& q) {
  FiniteDist noise = dt_pmf(t, noise_eps);
  // Distribution of |alpha1 + alpha2 - t| by exact convolution.
  DistBuilder conv;
  for (std::size_t a = 0; a < noise.size(); ++a) {
    for (std::size_t b = 0; b < noise.size(); ++b) {
      std::int64_t s = noise.domain()->at(a).as_int() +
                       noise.domain()->at(b).as_int() - t;
      conv.add(Value(s < 0 ? -s : s), noise.weight(a) * noise.weight(b));
    }
  }
  FiniteDist abs_err = conv.build();
  Rat cum(0);
  for (std::size_t i = 0; i < abs_err.size(); ++i) {
    cum += abs_err.weight(i);
    if (cum >= q) {
      return Rat(static_cast<long>(abs_err.domain()->at(i).as_int()));
    }
  }
  return Rat(static_cast<long>(
      abs_err.domain()->at(abs_err.size() - 1).as_int()));
}

}  // namespace msdp
