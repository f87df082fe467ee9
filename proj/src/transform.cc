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

#include "msdp/transform.h"

#include <algorithm>
#include <cmath>

namespace msdp {

namespace {

// M3 state layout: (slots, z, y2s, ptr, bits).
constexpr std::size_t kSlots = 0;
constexpr std::size_t kZ = 1;
constexpr std::size_t kY2 = 2;
constexpr std::size_t kPtr = 3;
constexpr std::size_t kBits = 4;

}  // namespace

TransformBudget budget_with_ell(int n, const Rat& ell, const Rat& beta) {
  if (n < 0) throw ConfigError("budget needs n >= 0");
  if (!(ell > 0) || ell > Rat(1, 2)) {
    throw ConfigError("ell must lie in (0, 1/2]");
  }
  if (!(beta > 0) || !(beta < 1)) throw ConfigError("beta must lie in (0, 1)");
  TransformBudget b;
  b.n = n;
  b.ell = ell;
  b.beta = beta;
  double elld = rat_to_double(ell);
  double expr = n + (2.0 * n / elld) * std::log(1.0 / elld) +
                (2.0 / elld) * std::log(1.0 / rat_to_double(beta));
  b.v = static_cast<long>(std::ceil(expr - 1e-12));
  b.m = n + b.v;
  return b;
}

TransformBudget sample_budget(int n, const Eps& eps, const Rat& beta) {
  // ell = 1/(2 e^{2 eps}); the upper factor bound keeps ell conservative.
  Rat ell = Rat(1) / (2 * eps.factor_upper() * eps.factor_upper());
  return budget_with_ell(n, ell, beta);
}

TransformBudget budget_with_stream_length(const TransformBudget& b, long m) {
  if (m < b.n) throw ConfigError("stream length below n");
  TransformBudget out = b;
  out.m = m;
  out.v = m - b.n;
  return out;
}

const Value& budget_exhausted_symbol() {
  static const Value v("budget-exhausted");
  return v;
}

namespace {

std::vector<std::vector<Rat>> max_tables(
    const std::vector<PurifiedChannel>& purified) {
  std::vector<std::vector<Rat>> out;
  for (const PurifiedChannel& pc : purified) {
    std::vector<Rat> maxes(pc.output_domain->size(), Rat(0));
    for (const FiniteDist& row : pc.table) {
      for (std::size_t y = 0; y < maxes.size(); ++y) {
        if (row.weight(y) > maxes[y]) maxes[y] = row.weight(y);
      }
    }
    out.push_back(std::move(maxes));
  }
  return out;
}

void require_two_server_shape(const Protocol& p) {
  p.validate();
  if (p.dag.k != 2 ||
      p.dag.edges != std::vector<std::pair<int, int>>{{0, 1}}) {
    throw ConfigError("two-server simulation needs k=2 with the (1,2) edge");
  }
}

}  // namespace

TwoServerModel::TwoServerModel(Protocol p, const Eps& eps, const Rat& delta)
    : p_(std::move(p)),
      eps_(eps),
      delta_(delta),
      fallbacks_(std::make_shared<std::atomic<long>>(0)) {
  require_two_server_shape(p_);
  for (int i = 0; i < p_.n; ++i) {
    const Randomizer& r = p_.randomizers[i];
    purified_.push_back(
        purify(r.input_domain(), r.coordinate_channel(0), eps_, delta_));
  }
  max_first_ = max_tables(purified_);
}

TwoServerModel::TwoServerModel(Protocol p, const Eps& eps, const Rat& delta,
                               std::vector<PurifiedChannel> purified)
    : p_(std::move(p)),
      eps_(eps),
      delta_(delta),
      purified_(std::move(purified)),
      fallbacks_(std::make_shared<std::atomic<long>>(0)) {
  require_two_server_shape(p_);
  if (static_cast<int>(purified_.size()) != p_.n) {
    throw ConfigError("need one replacement channel per user");
  }
  max_first_ = max_tables(purified_);
}

bool TwoServerModel::purification_skipped() const {
  for (const PurifiedChannel& pc : purified_) {
    if (pc.changed) return false;
  }
  return true;
}

FiniteDist TwoServerModel::purified_first_dist(int user,
                                               const Value& x) const {
  auto xi = p_.input_domain()->index_of(x);
  if (!xi) throw DomainMismatchError("input outside domain");
  return purified_[user].dist(*xi);
}

FiniteDist TwoServerModel::original_first_dist(int user,
                                               const Value& x) const {
  return p_.randomizers[user].channel(x).marginal_single(0);
}

FiniteDist TwoServerModel::second_given_first(int user, const Value& x,
                                              const Value& y1) const {
  const JointDist& joint = p_.randomizers[user].channel(x);
  try {
    return joint.condition({{0, y1}}).marginal_single(0);
  } catch (const ZeroMassError&) {
    // Purification moved mass onto a first message the original channel
    // never emits for this input; condition on the original support.
    fallbacks_->fetch_add(1);
    return joint.marginal_single(1);
  }
}

const Rat& TwoServerModel::max_first_prob(int user, const Value& y1) const {
  auto yi = purified_[user].output_domain->index_of(y1);
  if (!yi) throw DomainMismatchError("first message outside its domain");
  return max_first_[user][*yi];
}

Rat TwoServerModel::acceptance_rate(int user, const Value& x, const Value& y1,
                                    MutantKind mutant) const {
  auto xi = p_.input_domain()->index_of(x);
  if (!xi) throw DomainMismatchError("input outside domain");
  auto yi = purified_[user].output_domain->index_of(y1);
  if (!yi) throw DomainMismatchError("first message outside its domain");
  const Rat& num = purified_[user].dist(*xi).weight(*yi);
  if (mutant == MutantKind::kRateDenominatorDropped) return num;
  const Rat& mx = max_first_[user][*yi];
  if (mx == 0) {
    throw InternalError("acceptance rate queried for unreachable message");
  }
  return num / (2 * mx);
}

const DomainPtr& TwoServerModel::first_message_domain() const {
  return p_.randomizers.front().message_domains()[0];
}

namespace {

// Shared skeleton for the exact output enumerations: given per-user first
// message distributions and a per-(user, y1) second message distribution,
// walk y1 tuples, z, y2 tuples, and the final output.
class HybridEnumerator {
 public:
  HybridEnumerator(const TwoServerModel& model, std::size_t ceiling)
      : model_(model), ceiling_(ceiling) {}

  using FirstDist = std::function<FiniteDist(int user)>;
  using SecondDist =
      std::function<FiniteDist(int user, const Value& y1)>;

  // Accumulates P[z_out] into the builder, scaled by `scale`.
  void run(const FirstDist& first, const SecondDist& second, const Rat& scale,
           DistBuilder* out) {
    if (scale == 0) return;
    int n = model_.protocol().n;
    Value::List y1(n), y2(n);
    recurse_first(0, n, Rat(1) * scale, y1, y2, first, second, out);
  }

 private:
  void recurse_first(int i, int n, const Rat& w, Value::List& y1,
                     Value::List& y2, const FirstDist& first,
                     const SecondDist& second, DistBuilder* out) {
    if (i == n) {
      recurse_second(0, n, w, y1, y2, second, out);
      return;
    }
    FiniteDist d = first(i);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      y1[i] = d.domain()->at(a);
      recurse_first(i + 1, n, w * d.weight(a), y1, y2, first, second, out);
    }
  }

  void recurse_second(int i, int n, const Rat& w, Value::List& y1,
                      Value::List& y2, const SecondDist& second,
                      DistBuilder* out) {
    if (i == n) {
      finish(w, y1, y2, out);
      return;
    }
    FiniteDist d = second(i, y1[i]);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      y2[i] = d.domain()->at(a);
      recurse_second(i + 1, n, w * d.weight(a), y1, y2, second, out);
    }
  }

  void finish(const Rat& w, const Value::List& y1, const Value::List& y2,
              DistBuilder* out) {
    const Protocol& p = model_.protocol();
    FiniteDist zd = p.servers[0].apply(y1, {}, 1, /*is_sink=*/false);
    for (std::size_t za = 0; za < zd.size(); ++za) {
      if (zd.weight(za) == 0) continue;
      const Value& z = zd.domain()->at(za).as_list()[0];
      FiniteDist od = p.servers[1].apply(y2, {z}, 0, /*is_sink=*/true);
      for (std::size_t oa = 0; oa < od.size(); ++oa) {
        if (od.weight(oa) == 0) continue;
        if (++leaves_ > ceiling_) throw SizeCeilingError(leaves_, ceiling_);
        out->add(od.domain()->at(oa), w * zd.weight(za) * od.weight(oa));
      }
    }
  }

  const TwoServerModel& model_;
  std::size_t ceiling_;
  std::size_t leaves_ = 0;
};

void check_prior(const TwoServerModel& model, const FiniteDist& prior) {
  if (model.protocol().n == 0) return;
  if (!same_domain(prior.domain(), model.input_domain())) {
    throw DomainMismatchError("prior domain does not match protocol inputs");
  }
}

}  // namespace

FiniteDist m1_output_distribution(const TwoServerModel& model,
                                  const Value::List& x, std::size_t ceiling) {
  if (static_cast<int>(x.size()) != model.protocol().n) {
    throw ConfigError("input vector length does not match n");
  }
  DistBuilder out;
  HybridEnumerator e(model, ceiling);
  e.run([&](int i) { return model.purified_first_dist(i, x[i]); },
        [&](int i, const Value& y1) {
          return model.second_given_first(i, x[i], y1);
        },
        Rat(1), &out);
  return out.build();
}

FiniteDist m1_output_distribution(const TwoServerModel& model,
                                  const FiniteDist& prior,
                                  std::size_t ceiling) {
  check_prior(model, prior);
  int n = model.protocol().n;
  DistBuilder out;
  Value::List x(n);
  std::function<void(int, const Rat&)> rec = [&](int i, const Rat& w) {
    if (i == n) {
      HybridEnumerator e(model, ceiling);
      e.run([&](int u) { return model.purified_first_dist(u, x[u]); },
            [&](int u, const Value& y1) {
              return model.second_given_first(u, x[u], y1);
            },
            w, &out);
      return;
    }
    for (std::size_t a = 0; a < prior.size(); ++a) {
      if (prior.weight(a) == 0) continue;
      x[i] = prior.domain()->at(a);
      rec(i + 1, w * prior.weight(a));
    }
  };
  rec(0, Rat(1));
  return out.build();
}

namespace {

// Mixture of the second-message conditional over the posterior of the
// redrawn input given y1; the per-(user, y1) kernel of the re-sampling
// phase.
FiniteDist resampled_second(const TwoServerModel& model,
                            const FiniteDist& prior, int user,
                            const Value& y1) {
  FiniteDist post = posterior(
      prior,
      [&](const Value& x) { return model.purified_first_dist(user, x); }, y1);
  DistBuilder b;
  for (std::size_t a = 0; a < post.size(); ++a) {
    if (post.weight(a) == 0) continue;
    b.add_scaled(model.second_given_first(user, post.domain()->at(a), y1),
                 post.weight(a));
  }
  return b.build();
}

FiniteDist first_message_mixture(const TwoServerModel& model,
                                 const FiniteDist& prior, int user) {
  DistBuilder b;
  for (std::size_t a = 0; a < prior.size(); ++a) {
    if (prior.weight(a) == 0) continue;
    b.add_scaled(model.purified_first_dist(user, prior.domain()->at(a)),
                 prior.weight(a));
  }
  return b.build();
}

}  // namespace

FiniteDist m2_output_distribution(const TwoServerModel& model,
                                  const FiniteDist& prior,
                                  std::size_t ceiling) {
  check_prior(model, prior);
  DistBuilder out;
  HybridEnumerator e(model, ceiling);
  e.run([&](int i) { return first_message_mixture(model, prior, i); },
        [&](int i, const Value& y1) {
          return resampled_second(model, prior, i, y1);
        },
        Rat(1), &out);
  return out.build();
}

std::vector<AcceptanceCell> enumerate_acceptance(const TwoServerModel& model,
                                                 const FiniteDist& prior,
                                                 MutantKind mutant) {
  check_prior(model, prior);
  std::vector<AcceptanceCell> cells;
  const Protocol& p = model.protocol();
  for (int i = 0; i < p.n; ++i) {
    const DomainPtr& Y1 = model.purified(i).output_domain;
    for (const Value& y1 : Y1->elements()) {
      Rat reach(0);
      for (std::size_t a = 0; a < prior.size(); ++a) {
        reach += prior.weight(a) *
                 model.purified_first_dist(i, prior.domain()->at(a))
                     .prob_of(y1);
      }
      if (reach == 0) continue;
      std::vector<Rat> rates;
      DistBuilder accepted;
      Rat mixture(0);
      for (std::size_t a = 0; a < prior.size(); ++a) {
        const Value& x = prior.domain()->at(a);
        Rat rate = model.acceptance_rate(i, x, y1, mutant);
        rates.push_back(rate);
        Rat mass = prior.weight(a) * rate;
        mixture += mass;
        if (mass > 0) accepted.add(x, mass);
      }
      FiniteDist accepted_support = accepted.build_normalized();
      // Re-express over the prior's domain so the two routes align.
      std::vector<Rat> w(prior.size(), Rat(0));
      for (std::size_t a = 0; a < prior.size(); ++a) {
        w[a] = accepted_support.prob_of(prior.domain()->at(a));
      }
      cells.push_back(AcceptanceCell{
          i, y1, std::move(rates), mixture,
          FiniteDist(prior.domain(), std::move(w)),
          posterior(
              prior,
              [&](const Value& x) { return model.purified_first_dist(i, x); },
              y1)});
    }
  }
  return cells;
}

Rat geo_complete_prob(const std::vector<Rat>& p, long trials) {
  std::size_t n = p.size();
  if (n == 0) return Rat(1);
  if (trials <= 0) return Rat(0);
  std::vector<Rat> cur(n + 1, Rat(0));
  cur[0] = 1;
  for (long s = 0; s < trials; ++s) {
    std::vector<Rat> next(n + 1, Rat(0));
    next[n] = cur[n];
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] == 0) continue;
      next[i] += cur[i] * (Rat(1) - p[i]);
      next[i + 1] += cur[i] * p[i];
    }
    cur = std::move(next);
  }
  return cur[n];
}

namespace {

Value initial_m3_state() {
  return Value(Value::List{Value(Value::List{}), Value(), Value(Value::List{}),
                           Value(1), Value(Value::List{})});
}

}  // namespace

OnlineAlgorithm build_m3(const TwoServerModel& model,
                         const TransformBudget& budget, MutantKind mutant) {
  auto M = std::make_shared<const TwoServerModel>(model);
  const int n = model.protocol().n;
  const long m = budget.m;
  if (budget.n != n) throw ConfigError("budget n does not match protocol n");
  if (m < n) throw ConfigError("budget m below n");

  OnlineAlgorithm::InitFn init = [M, n]() {
    DistBuilder b;
    if (n == 0) {
      // The batch boundary happens immediately: z is drawn at start.
      FiniteDist zd =
          M->protocol().servers[0].apply({}, {}, 1, /*is_sink=*/false);
      for (std::size_t a = 0; a < zd.size(); ++a) {
        if (zd.weight(a) == 0) continue;
        b.add(Value(Value::List{Value(Value::List{}),
                                zd.domain()->at(a).as_list()[0],
                                Value(Value::List{}), Value(1),
                                Value(Value::List{})}),
              zd.weight(a));
      }
      return b.build();
    }
    b.add(initial_m3_state(), Rat(1));
    return b.build();
  };

  OnlineAlgorithm::UpdateFn update = [M, n, mutant](int step,
                                                    const Value& state,
                                                    const Value& x) {
    const Value::List& s = state.as_list();
    DistBuilder b;
    if (step <= n) {
      // First batch: draw this user's first message; at the batch boundary
      // also run server one.
      FiniteDist yd = M->purified_first_dist(step - 1, x);
      for (std::size_t a = 0; a < yd.size(); ++a) {
        if (yd.weight(a) == 0) continue;
        Value::List slots = s[kSlots].as_list();
        slots.push_back(yd.domain()->at(a));
        if (step == n) {
          FiniteDist zd =
              M->protocol().servers[0].apply(slots, {}, 1, /*is_sink=*/false);
          for (std::size_t za = 0; za < zd.size(); ++za) {
            if (zd.weight(za) == 0) continue;
            b.add(Value(Value::List{Value(slots),
                                    zd.domain()->at(za).as_list()[0],
                                    s[kY2], s[kPtr], s[kBits]}),
                  yd.weight(a) * zd.weight(za));
          }
        } else {
          b.add(Value(Value::List{Value(std::move(slots)), s[kZ], s[kY2],
                                  s[kPtr], s[kBits]}),
                yd.weight(a));
        }
      }
      return b.build();
    }
    // Second batch: rejection sampling on the fresh sample x.
    std::int64_t ptr = s[kPtr].as_int();
    if (ptr > n) {
      b.add(state, Rat(1));  // loop already broke; x is not read
      return b.build();
    }
    int user = static_cast<int>(ptr) - 1;
    const Value& y1 = s[kSlots].as_list()[user];
    Rat rate = M->acceptance_rate(user, x, y1, mutant);
    // The rate itself is consumed by the coin flip and never stored.
    if (rate < 1) {
      Value::List bits = s[kBits].as_list();
      bits.push_back(Value(0));
      b.add(Value(Value::List{s[kSlots], s[kZ], s[kY2], s[kPtr],
                              Value(std::move(bits))}),
            Rat(1) - rate);
    }
    if (rate > 0) {
      FiniteDist y2d = M->second_given_first(user, x, y1);
      for (std::size_t a = 0; a < y2d.size(); ++a) {
        if (y2d.weight(a) == 0) continue;
        Value::List slots = s[kSlots].as_list();
        if (mutant != MutantKind::kNoErasure) slots[user] = Value();
        Value::List y2s = s[kY2].as_list();
        y2s.push_back(y2d.domain()->at(a));
        Value::List bits = s[kBits].as_list();
        bits.push_back(Value(1));
        b.add(Value(Value::List{Value(std::move(slots)), s[kZ],
                                Value(std::move(y2s)), Value(ptr + 1),
                                Value(std::move(bits))}),
              rate * y2d.weight(a));
      }
    }
    return b.build();
  };

  OnlineAlgorithm::OutFn out = [M, n](const Value& state) {
    const Value::List& s = state.as_list();
    if (s[kPtr].as_int() == n + 1) {
      return M->protocol().servers[1].apply(s[kY2].as_list(), {s[kZ]}, 0,
                                            /*is_sink=*/true);
    }
    DistBuilder b;
    b.add(budget_exhausted_symbol(), Rat(1));
    return b.build();
  };

  DomainPtr input = n > 0 ? model.input_domain() : Domain::bits();
  return OnlineAlgorithm(static_cast<int>(m), input, std::move(init),
                         std::move(update), std::move(out));
}

std::size_t verify_m3_erasure(const OnlineAlgorithm& alg,
                              const Value::List& stream,
                              std::size_t ceiling) {
  std::size_t checked = 0;
  for (int t = 0; t <= alg.stream_length(); ++t) {
    FiniteDist d = state_distribution(alg, stream, t, ceiling);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      const Value::List& s = d.domain()->at(a).as_list();
      if (s.size() != 5) throw InternalError("unexpected state arity");
      const Value::List& slots = s[kSlots].as_list();
      std::int64_t ptr = s[kPtr].as_int();
      const Value::List& bits = s[kBits].as_list();
      const Value::List& y2s = s[kY2].as_list();
      std::int64_t ones = 0;
      for (const Value& bit : bits) ones += bit.as_int();
      if (ones != static_cast<std::int64_t>(y2s.size())) {
        throw InternalError("coin history inconsistent with acceptances");
      }
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(slots.size());
           ++i) {
        if (i < ptr - 1 && !slots[i].is_null()) {
          throw InternalError(
              "first-batch message survived past its erasure point at t=" +
              std::to_string(t));
        }
        if (i >= ptr - 1 && slots[i].is_null()) {
          throw InternalError("pending first-batch message missing");
        }
      }
      ++checked;
    }
  }
  return checked;
}

M3OutputResult m3_output_distribution(const TwoServerModel& model,
                                      const FiniteDist& prior,
                                      std::optional<long> budget_v,
                                      std::size_t ceiling, MutantKind mutant) {
  check_prior(model, prior);
  const Protocol& p = model.protocol();
  const int n = p.n;
  DistBuilder out;
  Rat trunc(0);

  // Walk first-message tuples under the prior mixture; waiting times and
  // second messages decouple given the tuple, so the geometric stage
  // collapses to a completion probability and per-user accepted kernels.
  std::vector<FiniteDist> first;
  for (int i = 0; i < n; ++i) {
    first.push_back(first_message_mixture(model, prior, i));
  }
  Value::List y1(n);
  std::size_t leaves = 0;
  std::function<void(int, const Rat&)> rec = [&](int i, const Rat& w) {
    if (i < n) {
      const FiniteDist& d = first[i];
      for (std::size_t a = 0; a < d.size(); ++a) {
        if (d.weight(a) == 0) continue;
        y1[i] = d.domain()->at(a);
        rec(i + 1, w * d.weight(a));
      }
      return;
    }
    // Acceptance rates and accepted second-message kernels per user.
    std::vector<Rat> mix(n, Rat(0));
    std::vector<FiniteDist> y2d;
    for (int u = 0; u < n; ++u) {
      DistBuilder acc;
      for (std::size_t a = 0; a < prior.size(); ++a) {
        const Value& x = prior.domain()->at(a);
        Rat mass =
            prior.weight(a) * model.acceptance_rate(u, x, y1[u], mutant);
        mix[u] += mass;
        if (mass > 0) {
          acc.add_scaled(model.second_given_first(u, x, y1[u]), mass);
        }
      }
      y2d.push_back(acc.build_normalized());
    }
    Rat complete =
        budget_v ? geo_complete_prob(mix, *budget_v) : Rat(1);
    if (complete > 0) {
      Value::List y2(n);
      std::function<void(int, const Rat&)> rec2 = [&](int u, const Rat& w2) {
        if (u == n) {
          FiniteDist zd = p.servers[0].apply(y1, {}, 1, /*is_sink=*/false);
          for (std::size_t za = 0; za < zd.size(); ++za) {
            if (zd.weight(za) == 0) continue;
            const Value& z = zd.domain()->at(za).as_list()[0];
            FiniteDist od = p.servers[1].apply(y2, {z}, 0, /*is_sink=*/true);
            for (std::size_t oa = 0; oa < od.size(); ++oa) {
              if (od.weight(oa) == 0) continue;
              if (++leaves > ceiling) throw SizeCeilingError(leaves, ceiling);
              out.add(od.domain()->at(oa),
                      w2 * zd.weight(za) * od.weight(oa));
            }
          }
          return;
        }
        for (std::size_t a = 0; a < y2d[u].size(); ++a) {
          if (y2d[u].weight(a) == 0) continue;
          y2[u] = y2d[u].domain()->at(a);
          rec2(u + 1, w2 * y2d[u].weight(a));
        }
      };
      rec2(0, w * complete);
    }
    if (budget_v) {
      Rat fail = w * (Rat(1) - complete);
      if (fail > 0) {
        out.add(budget_exhausted_symbol(), fail);
        trunc += fail;
      }
    }
  };
  rec(0, Rat(1));
  M3OutputResult result{out.build(), trunc};
  return result;
}

ReductionGrouping reduction_grouping(const Protocol& p) {
  ReductionGrouping g;
  g.k = p.dag.k;
  g.first_half_end = (p.dag.k + 1) / 2;
  for (const auto& e : p.dag.edges) {
    if (e.first < g.first_half_end && e.second >= g.first_half_end) {
      g.bundled_edges.push_back(e);
    }
  }
  std::sort(g.bundled_edges.begin(), g.bundled_edges.end());
  return g;
}

namespace {

DomainPtr product_domain(const std::vector<DomainPtr>& doms) {
  std::size_t total = 1;
  for (const DomainPtr& d : doms) {
    total *= d->size();
    if (total > (1u << 20)) {
      throw SizeCeilingError(total, 1u << 20);
    }
  }
  std::vector<Value> elems;
  elems.reserve(total);
  Value::List tuple(doms.size());
  std::function<void(std::size_t)> rec = [&](std::size_t c) {
    if (c == doms.size()) {
      elems.push_back(Value(tuple));
      return;
    }
    for (const Value& v : doms[c]->elements()) {
      tuple[c] = v;
      rec(c + 1);
    }
  };
  rec(0);
  return Domain::make(std::move(elems));
}

// Simulates a contiguous block of the original servers, fed by per-user
// message bundles and (for the second half) the bundled cross-half
// messages. Emits either the bundle of cross-half messages (first half) or
// z_out (second half).
FiniteDist simulate_half(const Protocol& original, const ReductionGrouping& g,
                         bool second_half, const Value::List& user_bundles,
                         const Value::List& incoming_bundle) {
  int from = second_half ? g.first_half_end : 0;
  int to = second_half ? original.dag.k : g.first_half_end;
  int n = static_cast<int>(user_bundles.size());

  // Messages by original edge index, as far as known.
  std::vector<Value> edge_values(original.dag.edges.size());
  if (second_half) {
    for (std::size_t b = 0; b < g.bundled_edges.size(); ++b) {
      auto it = std::find(original.dag.edges.begin(),
                          original.dag.edges.end(), g.bundled_edges[b]);
      edge_values[it - original.dag.edges.begin()] =
          incoming_bundle[b];
    }
  }

  DistBuilder result;
  std::function<void(int, const Rat&)> rec = [&](int j, const Rat& w) {
    if (j == to) {
      if (second_half) {
        throw InternalError("second half must end at the sink");
      }
      Value::List bundle;
      for (const auto& be : g.bundled_edges) {
        auto it = std::find(original.dag.edges.begin(),
                            original.dag.edges.end(), be);
        bundle.push_back(edge_values[it - original.dag.edges.begin()]);
      }
      result.add(Value(bundle), w);
      return;
    }
    Value::List col;
    col.reserve(n);
    for (int i = 0; i < n; ++i) {
      col.push_back(user_bundles[i].as_list()[j - from]);
    }
    std::vector<int> in = original.dag.in_edges(j);
    Value::List incoming;
    for (int e : in) incoming.push_back(edge_values[e]);
    std::vector<int> outs = original.dag.out_edges(j);
    bool is_sink = (j == original.dag.k - 1);
    FiniteDist d =
        original.servers[j].apply(col, incoming, outs.size(), is_sink);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      const Value& v = d.domain()->at(a);
      if (is_sink) {
        result.add(v, w * d.weight(a));
        continue;
      }
      const Value::List& tuple = v.as_list();
      for (std::size_t idx = 0; idx < outs.size(); ++idx) {
        edge_values[outs[idx]] = tuple[idx];
      }
      rec(j + 1, w * d.weight(a));
    }
  };
  rec(from, Rat(1));
  return result.build();
}

}  // namespace

Protocol reduce_k_to_2(const Protocol& p) {
  p.validate();
  if (p.dag.k == 2) return p;
  if (p.dag.k < 2) throw ConfigError("reduction needs k >= 2");
  ReductionGrouping g = reduction_grouping(p);
  int h = g.first_half_end;

  Protocol out;
  out.n = p.n;
  out.dag.k = 2;
  out.dag.edges = {{0, 1}};

  for (const Randomizer& r : p.randomizers) {
    std::vector<DomainPtr> front(r.message_domains().begin(),
                                 r.message_domains().begin() + h);
    std::vector<DomainPtr> back(r.message_domains().begin() + h,
                                r.message_domains().end());
    DomainPtr d1 = product_domain(front);
    DomainPtr d2 = product_domain(back);
    std::vector<JointDist> channel;
    for (std::size_t xi = 0; xi < r.input_domain()->size(); ++xi) {
      std::vector<std::pair<Value::List, Rat>> atoms;
      r.channel_by_index(xi).for_each_atom(
          [&](const Value::List& tuple, const Rat& w) {
            Value::List a(tuple.begin(), tuple.begin() + h);
            Value::List b(tuple.begin() + h, tuple.end());
            atoms.push_back({{Value(a), Value(b)}, w});
          });
      channel.push_back(JointDist::from_atoms({d1, d2}, atoms));
    }
    out.randomizers.emplace_back(r.input_domain(), std::move(channel));
  }

  Protocol original = p;  // captured by the simulated servers
  ReductionGrouping grouping = g;
  out.servers.push_back(ServerAlg(
      "reduced-first-half",
      [original, grouping](const Value::List& user_msgs,
                           const Value::List&) {
        return simulate_half(original, grouping, /*second_half=*/false,
                             user_msgs, {});
      }));
  out.servers.push_back(ServerAlg(
      "reduced-second-half",
      [original, grouping](const Value::List& user_msgs,
                           const Value::List& incoming) {
        return simulate_half(original, grouping, /*second_half=*/true,
                             user_msgs,
                             incoming.empty() ? Value::List{}
                                              : incoming[0].as_list());
      }));
  out.validate();
  return out;
}

Transcript reduce_transcript(const Protocol& original, const Transcript& t) {
  ReductionGrouping g = reduction_grouping(original);
  int h = g.first_half_end;
  Transcript out;
  out.user_messages.reserve(t.user_messages.size());
  for (const Value::List& row : t.user_messages) {
    Value::List a(row.begin(), row.begin() + h);
    Value::List b(row.begin() + h, row.end());
    out.user_messages.push_back({Value(a), Value(b)});
  }
  Value::List bundle;
  for (const auto& be : g.bundled_edges) {
    auto it = std::find(original.dag.edges.begin(), original.dag.edges.end(),
                        be);
    bundle.push_back(t.server_messages[it - original.dag.edges.begin()]);
  }
  out.server_messages = {Value(bundle)};
  out.z_out = t.z_out;
  return out;
}

Attack lift_reduced_attack(const Protocol& original, const Attack& reduced) {
  ReductionGrouping g = reduction_grouping(original);
  Attack out;
  out.corrupt_users = reduced.corrupt_users;
  if (reduced.corrupt_servers.empty()) return out;
  if (reduced.corrupt_servers.size() > 1) {
    throw ConfigError("reduced attack may corrupt at most one server");
  }
  if (reduced.corrupt_servers[0] == 0) {
    for (int j = 0; j < g.first_half_end; ++j) out.corrupt_servers.push_back(j);
  } else {
    for (int j = g.first_half_end; j < g.k; ++j) {
      out.corrupt_servers.push_back(j);
    }
  }
  return out;
}

TransformResult transform_protocol(const Protocol& p, const Eps& eps,
                                   const Rat& delta, const Rat& beta,
                                   bool attested, std::size_t ceiling,
                                   MutantKind mutant) {
  p.validate();
  int half = (p.dag.k + 1) / 2;
  bool certified = false;
  if (!attested) {
    ProtocolDpReport dp = check_protocol_dp(p, half, eps, delta, ceiling);
    if (dp.verdict != Verdict::kSatisfied) {
      throw ConfigError(
          "protocol failed its privacy certification against " +
          std::to_string(half) +
          " corrupted servers; transform refused (max excess " +
          rat_to_string(dp.worst.report.max_delta_upper()) + ")");
    }
    certified = true;
  }
  TransformResult result;
  result.reduced = reduce_k_to_2(p);
  result.model = std::make_shared<TwoServerModel>(result.reduced, eps, delta);
  result.budget = sample_budget(p.n, eps, beta);
  result.algorithm = build_m3(*result.model, result.budget, mutant);
  if (p.dag.k > 2) result.grouping = reduction_grouping(p);
  result.claimed_eps = eps.pow(7);
  result.claimed_delta = 3 * eps.pow(5).factor_lower() * delta;
  result.was_certified = certified;
  return result;
}

}  // namespace msdp
