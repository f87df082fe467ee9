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

#include "msdp/online.h"

#include <map>

#include "msdp/parallel.h"

namespace msdp {

OnlineAlgorithm::OnlineAlgorithm(int stream_length, DomainPtr input_domain,
                                 InitFn init, UpdateFn update, OutFn out)
    : m_(stream_length),
      input_domain_(std::move(input_domain)),
      init_(std::move(init)),
      update_(std::move(update)),
      out_(std::move(out)) {
  if (m_ < 0) throw ConfigError("stream length must be >= 0");
  if (!input_domain_) throw ConfigError("online algorithm needs an input domain");
}

FiniteDist OnlineAlgorithm::update(int step, const Value& state,
                                   const Value& x) const {
  if (step < 1 || step > m_) throw ConfigError("update step out of range");
  return update_(step, state, x);
}

OnlineRun run_online(const OnlineAlgorithm& alg, const Value::List& stream,
                     Rng& rng, bool keep_snapshots) {
  if (static_cast<int>(stream.size()) != alg.stream_length()) {
    throw ConfigError("stream length " + std::to_string(stream.size()) +
                      " does not match declared length " +
                      std::to_string(alg.stream_length()));
  }
  for (const Value& x : stream) {
    if (!alg.input_domain()->index_of(x)) {
      throw DomainMismatchError("stream symbol " + x.to_string() +
                                " outside input domain");
    }
  }
  OnlineRun run;
  Value state = sample(alg.init(), rng);
  if (keep_snapshots) run.snapshots.push_back(state);
  for (int i = 1; i <= alg.stream_length(); ++i) {
    state = sample(alg.update(i, state, stream[i - 1]), rng);
    if (keep_snapshots) run.snapshots.push_back(state);
  }
  run.output = sample(alg.out(state), rng);
  return run;
}

namespace {

FiniteDist advance(const OnlineAlgorithm& alg, const FiniteDist& states,
                   int step, const Value& x, std::size_t ceiling) {
  DistBuilder b;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states.weight(i) == 0) continue;
    b.add_scaled(alg.update(step, states.domain()->at(i), x),
                 states.weight(i));
    if (b.atoms() > ceiling) throw SizeCeilingError(b.atoms(), ceiling);
  }
  return b.build();
}

FiniteDist augment_with_output(const OnlineAlgorithm& alg,
                               const FiniteDist& states,
                               std::size_t ceiling) {
  DistBuilder b;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states.weight(i) == 0) continue;
    const Value& s = states.domain()->at(i);
    FiniteDist od = alg.out(s);
    for (std::size_t a = 0; a < od.size(); ++a) {
      if (od.weight(a) == 0) continue;
      b.add(Value(Value::List{s, od.domain()->at(a)}),
            states.weight(i) * od.weight(a));
    }
    if (b.atoms() > ceiling) throw SizeCeilingError(b.atoms(), ceiling);
  }
  return b.build();
}

}  // namespace

FiniteDist state_distribution(const OnlineAlgorithm& alg,
                              const Value::List& stream, int t,
                              std::size_t ceiling) {
  if (t < 0 || t > alg.stream_length()) {
    throw ConfigError("intrusion time outside [0, m]");
  }
  if (static_cast<int>(stream.size()) < t) {
    throw ConfigError("stream shorter than requested time");
  }
  FiniteDist d = alg.init();
  for (int i = 1; i <= t; ++i) {
    d = advance(alg, d, i, stream[i - 1], ceiling);
  }
  return d;
}

FiniteDist online_output_distribution(const OnlineAlgorithm& alg,
                                      const Value::List& stream,
                                      std::size_t ceiling) {
  FiniteDist final_states =
      state_distribution(alg, stream, alg.stream_length(), ceiling);
  DistBuilder b;
  for (std::size_t i = 0; i < final_states.size(); ++i) {
    if (final_states.weight(i) == 0) continue;
    b.add_scaled(alg.out(final_states.domain()->at(i)),
                 final_states.weight(i));
  }
  return b.build();
}

FiniteDist final_state_with_output(const OnlineAlgorithm& alg,
                                   const Value::List& stream,
                                   std::size_t ceiling) {
  FiniteDist final_states =
      state_distribution(alg, stream, alg.stream_length(), ceiling);
  return augment_with_output(alg, final_states, ceiling);
}

InternalPrivacyReport check_internal_privacy(
    const OnlineAlgorithm& alg, const Eps& eps, const Rat& delta,
    const InternalPrivacyOptions& opts) {
  const DomainPtr& X = alg.input_domain();
  const int m = alg.stream_length();

  InternalPrivacyReport report;
  report.verdict = Verdict::kSatisfied;
  bool have_worst = false;

  auto absorb = [&](std::vector<InternalPrivacyCell>& cells) {
    for (InternalPrivacyCell& cell : cells) {
      ++report.cells;
      if (cell.report.verdict == Verdict::kViolated) {
        report.verdict = Verdict::kViolated;
      } else if (cell.report.verdict == Verdict::kIndeterminate &&
                 report.verdict == Verdict::kSatisfied) {
        report.verdict = Verdict::kIndeterminate;
      }
      if (!have_worst ||
          cell.report.max_delta_upper() > report.worst.report.max_delta_upper()) {
        report.worst = cell;
        have_worst = true;
      }
    }
  };

  using Level = std::map<Value::List, FiniteDist>;

  auto level_pairs = [&](const Level& level, int t, int reported_time) {
    struct Task {
      const Value::List* a;
      const Value::List* b;
      int differing;
    };
    int lo = opts.min_differing_index;
    int hi = opts.max_differing_index < 0 ? t : opts.max_differing_index;
    std::vector<Task> tasks;
    std::vector<Value::List> siblings;
    // Collect first so pointers into `siblings` stay stable.
    for (const auto& [prefix, dist] : level) {
      for (int i = 0; i < t; ++i) {
        if (i + 1 < lo || i + 1 > hi) continue;
        for (const Value& alt : X->elements()) {
          if (!(prefix[i] < alt)) continue;
          Value::List sib = prefix;
          sib[i] = alt;
          siblings.push_back(std::move(sib));
        }
      }
    }
    std::size_t si = 0;
    for (const auto& [prefix, dist] : level) {
      for (int i = 0; i < t; ++i) {
        if (i + 1 < lo || i + 1 > hi) continue;
        for (const Value& alt : X->elements()) {
          if (!(prefix[i] < alt)) continue;
          tasks.push_back(Task{&prefix, &siblings[si], i + 1});
          ++si;
        }
      }
    }
    std::vector<InternalPrivacyCell> cells(tasks.size());
    parallel_for(
        tasks.size(),
        [&](std::size_t idx) {
          const Task& task = tasks[idx];
          auto [pa, qa] =
              align_union(level.at(*task.a), level.at(*task.b));
          InternalPrivacyCell cell;
          cell.stream = *task.a;
          cell.stream_alt = *task.b;
          cell.differing_index = task.differing;
          cell.time = reported_time;
          cell.report = check_closeness(pa, qa, eps, delta);
          cells[idx] = std::move(cell);
        },
        opts.parallel);
    absorb(cells);
  };

  Level cur;
  cur.emplace(Value::List{}, alg.init());
  for (int t = 1; t <= m; ++t) {
    Level next;
    for (const auto& [prefix, dist] : cur) {
      for (const Value& v : X->elements()) {
        Value::List p2 = prefix;
        p2.push_back(v);
        next.emplace(std::move(p2), advance(alg, dist, t, v, opts.ceiling));
      }
    }
    cur = std::move(next);
    level_pairs(cur, t, t);
    if (t == m && opts.include_output_at_end) {
      Level augmented;
      for (const auto& [prefix, dist] : cur) {
        augmented.emplace(prefix,
                          augment_with_output(alg, dist, opts.ceiling));
      }
      level_pairs(augmented, m, m + 1);
    }
  }
  return report;
}

}  // namespace msdp
