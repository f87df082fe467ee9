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

#include "msdp/protocol.h"

#include <algorithm>

#include "msdp/parallel.h"

namespace msdp {

void CommDag::validate() const {
  if (k < 1) throw ConfigError("dag.k: need at least one server");
  for (const auto& [a, b] : edges) {
    std::string name = "(" + std::to_string(a + 1) + "," +
                       std::to_string(b + 1) + ")";
    if (a < 0 || b < 0 || a >= k || b >= k) {
      throw ConfigError("dag.edges: edge " + name + " out of range");
    }
    if (a >= b) {
      throw ConfigError("dag.edges: edge " + name +
                        " must go forward in the topological order");
    }
    if (a == k - 1) {
      throw ConfigError("dag.edges: edge " + name +
                        " leaves the sink server");
    }
  }
  std::vector<std::pair<int, int>> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("dag.edges: duplicate edge");
  }
  if (sorted != edges) throw ConfigError("dag.edges must be sorted");
}

std::vector<int> CommDag::in_edges(int server) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].second == server) out.push_back(static_cast<int>(e));
  }
  return out;
}

std::vector<int> CommDag::out_edges(int server) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].first == server) out.push_back(static_cast<int>(e));
  }
  return out;
}

ServerAlg::ServerAlg(std::string kind, Core core, bool emits_tuple)
    : kind_(std::move(kind)), core_(std::move(core)), emits_tuple_(emits_tuple) {}

FiniteDist ServerAlg::apply(const Value::List& user_msgs,
                            const Value::List& incoming,
                            std::size_t out_degree, bool is_sink) const {
  FiniteDist d = core_(user_msgs, incoming);
  if (is_sink) return d;
  if (emits_tuple_) {
    for (const Value& v : d.domain()->elements()) {
      if (!v.is_list() || v.as_list().size() != out_degree) {
        throw ConfigError("server '" + kind_ +
                          "' tuple arity does not match its out-edges");
      }
    }
    return d;
  }
  return d.map([out_degree](const Value& v) {
    return Value(Value::List(out_degree, v));
  });
}

ServerAlg forward_server() {
  return ServerAlg(
      "forward",
      [](const Value::List& user_msgs, const Value::List& incoming) {
        Value::List bundle = user_msgs;
        bundle.insert(bundle.end(), incoming.begin(), incoming.end());
        Value v = bundle.size() == 1 ? bundle.front() : Value(bundle);
        DistBuilder b;
        b.add(v, Rat(1));
        return b.build();
      });
}

namespace {

void flatten_ints(const Value& v, std::int64_t* sum) {
  if (v.is_int()) {
    *sum += v.as_int();
  } else if (v.is_list()) {
    for (const Value& item : v.as_list()) flatten_ints(item, sum);
  } else if (!v.is_null()) {
    throw ConfigError("linear server received non-integer message " +
                      v.to_string());
  }
}

void flatten_bits(const Value& v, int* acc) {
  if (v.is_int()) {
    *acc ^= static_cast<int>(v.as_int() & 1);
  } else if (v.is_list()) {
    for (const Value& item : v.as_list()) flatten_bits(item, acc);
  } else if (!v.is_null()) {
    throw ConfigError("xor server received non-bit message " + v.to_string());
  }
}

}  // namespace

ServerAlg linear_server(LinearServerSpec spec) {
  return ServerAlg(
      "linear",
      [spec = std::move(spec)](const Value::List& user_msgs,
                               const Value::List& incoming) {
        std::int64_t base = spec.offset;
        std::int64_t users = 0;
        for (const Value& y : user_msgs) {
          if (!y.is_int()) {
            throw ConfigError("linear server expects integer user messages");
          }
          std::int64_t v = y.as_int();
          if (spec.user_clamp &&
              (v < spec.user_clamp->first || v > spec.user_clamp->second)) {
            continue;  // out-of-range messages contribute zero
          }
          users += v;
        }
        base += spec.user_sign * users;
        std::int64_t servers = 0;
        for (const Value& z : incoming) flatten_ints(z, &servers);
        base += spec.server_sign * servers;
        DistBuilder b;
        if (spec.noise) {
          const FiniteDist& nd = *spec.noise;
          for (std::size_t i = 0; i < nd.size(); ++i) {
            if (nd.weight(i) == 0) continue;
            b.add(Value(base + nd.domain()->at(i).as_int()), nd.weight(i));
          }
        } else {
          b.add(Value(base), Rat(1));
        }
        return b.build();
      });
}

ServerAlg xor_server(const Rat& noise_flip) {
  if (noise_flip < 0 || noise_flip > 1) {
    throw ConfigError("xor server flip probability outside [0,1]");
  }
  return ServerAlg(
      "xor",
      [noise_flip](const Value::List& user_msgs, const Value::List& incoming) {
        int acc = 0;
        for (const Value& y : user_msgs) flatten_bits(y, &acc);
        for (const Value& z : incoming) flatten_bits(z, &acc);
        DistBuilder b;
        if (noise_flip > 0) {
          b.add(Value(acc), Rat(1) - noise_flip);
          b.add(Value(acc ^ 1), noise_flip);
        } else {
          b.add(Value(acc), Rat(1));
        }
        return b.build();
      });
}

ServerAlg constant_server(Value v) {
  return ServerAlg("const",
                   [v = std::move(v)](const Value::List&, const Value::List&) {
                     DistBuilder b;
                     b.add(v, Rat(1));
                     return b.build();
                   });
}

const DomainPtr& Protocol::input_domain() const {
  if (randomizers.empty()) throw ConfigError("protocol has no users");
  return randomizers.front().input_domain();
}

void Protocol::validate() const {
  if (n < 0) throw ConfigError("protocol.n must be >= 0");
  if (static_cast<int>(randomizers.size()) != n) {
    throw ConfigError("protocol needs one randomizer per user");
  }
  dag.validate();
  if (static_cast<int>(servers.size()) != dag.k) {
    throw ConfigError("protocol needs one algorithm per server");
  }
  for (const Randomizer& r : randomizers) {
    if (static_cast<int>(r.arity()) != dag.k) {
      throw ConfigError("randomizer arity " + std::to_string(r.arity()) +
                        " does not match server count " +
                        std::to_string(dag.k));
    }
    if (!same_domain(r.input_domain(), randomizers.front().input_domain())) {
      throw ConfigError("randomizers disagree on the input domain");
    }
    for (int j = 0; j < dag.k; ++j) {
      if (!same_domain(r.message_domains()[j],
                       randomizers.front().message_domains()[j])) {
        throw ConfigError("randomizers disagree on message domain " +
                          std::to_string(j + 1));
      }
    }
  }
}

namespace {

struct ExecutionShape {
  std::vector<std::vector<int>> in_edges;   // per server
  std::vector<std::vector<int>> out_edges;  // per server

  explicit ExecutionShape(const CommDag& dag) {
    in_edges.reserve(dag.k);
    out_edges.reserve(dag.k);
    for (int j = 0; j < dag.k; ++j) {
      in_edges.push_back(dag.in_edges(j));
      out_edges.push_back(dag.out_edges(j));
    }
  }
};

Value::List user_column(const std::vector<Value::List>& y, int j) {
  Value::List col;
  col.reserve(y.size());
  for (const Value::List& row : y) col.push_back(row[j]);
  return col;
}

Value::List incoming_values(const Transcript& t,
                            const std::vector<int>& in_edges) {
  Value::List vals;
  vals.reserve(in_edges.size());
  for (int e : in_edges) vals.push_back(t.server_messages[e]);
  return vals;
}

void assign_out_messages(Transcript* t, const std::vector<int>& out_edges,
                         const Value& emitted) {
  const Value::List& tuple = emitted.as_list();
  for (std::size_t idx = 0; idx < out_edges.size(); ++idx) {
    t->server_messages[out_edges[idx]] = tuple[idx];
  }
}

}  // namespace

Transcript execute(const Protocol& p, const Value::List& x, Rng& rng) {
  p.validate();
  if (static_cast<int>(x.size()) != p.n) {
    throw ConfigError("input vector length " + std::to_string(x.size()) +
                      " does not match n=" + std::to_string(p.n));
  }
  ExecutionShape shape(p.dag);
  Transcript t;
  t.user_messages.resize(p.n);
  t.server_messages.resize(p.dag.edges.size());
  for (int i = 0; i < p.n; ++i) {
    FiniteDist tuple = p.randomizers[i].channel(x[i]).as_tuple_dist();
    t.user_messages[i] = sample(tuple, rng).as_list();
  }
  for (int j = 0; j < p.dag.k; ++j) {
    bool is_sink = (j == p.dag.k - 1);
    FiniteDist d = p.servers[j].apply(user_column(t.user_messages, j),
                                      incoming_values(t, shape.in_edges[j]),
                                      shape.out_edges[j].size(), is_sink);
    Value v = sample(d, rng);
    if (is_sink) {
      t.z_out = v;
    } else {
      assign_out_messages(&t, shape.out_edges[j], v);
    }
  }
  return t;
}

namespace {

class TranscriptEnumerator {
 public:
  TranscriptEnumerator(const Protocol& p, const Value::List& x,
                       std::size_t ceiling,
                       const std::function<void(const Transcript&, const Rat&)>& visit)
      : p_(p), shape_(p.dag), ceiling_(ceiling), visit_(visit) {
    t_.user_messages.resize(p.n);
    t_.server_messages.resize(p.dag.edges.size());
    user_tuples_.reserve(p.n);
    for (int i = 0; i < p.n; ++i) {
      user_tuples_.push_back(p.randomizers[i].channel(x[i]).as_tuple_dist());
    }
  }

  void run() { recurse_user(0, Rat(1)); }

 private:
  void recurse_user(int i, const Rat& w) {
    if (i == p_.n) {
      recurse_server(0, w);
      return;
    }
    const FiniteDist& d = user_tuples_[i];
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      t_.user_messages[i] = d.domain()->at(a).as_list();
      recurse_user(i + 1, w * d.weight(a));
    }
  }

  void recurse_server(int j, const Rat& w) {
    if (j == p_.dag.k) {
      if (++leaves_ > ceiling_) throw SizeCeilingError(leaves_, ceiling_);
      visit_(t_, w);
      return;
    }
    bool is_sink = (j == p_.dag.k - 1);
    FiniteDist d = p_.servers[j].apply(
        user_column(t_.user_messages, j),
        incoming_values(t_, shape_.in_edges[j]),
        shape_.out_edges[j].size(), is_sink);
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (d.weight(a) == 0) continue;
      const Value& v = d.domain()->at(a);
      if (is_sink) {
        t_.z_out = v;
      } else {
        assign_out_messages(&t_, shape_.out_edges[j], v);
      }
      recurse_server(j + 1, w * d.weight(a));
    }
  }

  const Protocol& p_;
  ExecutionShape shape_;
  std::size_t ceiling_;
  const std::function<void(const Transcript&, const Rat&)>& visit_;
  Transcript t_;
  std::vector<FiniteDist> user_tuples_;
  std::size_t leaves_ = 0;
};

}  // namespace

void enumerate_transcripts(
    const Protocol& p, const Value::List& x, std::size_t ceiling,
    const std::function<void(const Transcript&, const Rat&)>& visit) {
  p.validate();
  if (static_cast<int>(x.size()) != p.n) {
    throw ConfigError("input vector length does not match n");
  }
  TranscriptEnumerator(p, x, ceiling, visit).run();
}

FiniteDist output_distribution(const Protocol& p, const Value::List& x,
                               std::size_t ceiling) {
  DistBuilder b;
  enumerate_transcripts(p, x, ceiling,
                        [&](const Transcript& t, const Rat& w) {
                          b.add(t.z_out, w);
                        });
  return b.build();
}

namespace {

void enumerate_input_vectors(
    const FiniteDist& prior, int n,
    const std::function<void(const Value::List&, const Rat&)>& fn) {
  Value::List x(n);
  std::function<void(int, const Rat&)> rec = [&](int i, const Rat& w) {
    if (i == n) {
      fn(x, w);
      return;
    }
    for (std::size_t a = 0; a < prior.size(); ++a) {
      if (prior.weight(a) == 0) continue;
      x[i] = prior.domain()->at(a);
      rec(i + 1, w * prior.weight(a));
    }
  };
  rec(0, Rat(1));
}

}  // namespace

FiniteDist output_distribution(const Protocol& p, const FiniteDist& prior,
                               std::size_t ceiling) {
  if (!same_domain(prior.domain(), p.input_domain())) {
    throw DomainMismatchError("prior domain does not match protocol inputs");
  }
  DistBuilder b;
  enumerate_input_vectors(prior, p.n, [&](const Value::List& x, const Rat& wx) {
    enumerate_transcripts(p, x, ceiling,
                          [&](const Transcript& t, const Rat& w) {
                            b.add(t.z_out, wx * w);
                          });
  });
  return b.build();
}

ViewSpec ViewSpec::make(const Protocol& p, const Attack& a) {
  std::vector<bool> user_corrupt(p.n, false);
  std::vector<bool> server_corrupt(p.dag.k, false);
  for (int i : a.corrupt_users) {
    if (i < 0 || i >= p.n) throw ConfigError("corrupt user index out of range");
    user_corrupt[i] = true;
  }
  for (int j : a.corrupt_servers) {
    if (j < 0 || j >= p.dag.k) {
      throw ConfigError("corrupt server index out of range");
    }
    server_corrupt[j] = true;
  }
  ViewSpec spec;
  spec.corrupt_users = a.corrupt_users;
  std::sort(spec.corrupt_users.begin(), spec.corrupt_users.end());
  for (std::size_t e = 0; e < p.dag.edges.size(); ++e) {
    const auto& [src, dst] = p.dag.edges[e];
    if (!(!server_corrupt[src] && !server_corrupt[dst])) {
      spec.visible_edges.push_back(static_cast<int>(e));
    }
  }
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.dag.k; ++j) {
      if (!(!user_corrupt[i] && !server_corrupt[j])) {
        spec.visible_user_msgs.push_back({i, j});
      }
    }
  }
  return spec;
}

Value ViewSpec::project(const Transcript& t, const Value::List& x) const {
  // Flat tuple: z_out, visible server messages, visible user messages,
  // corrupted inputs. The per-attack index sets are fixed, so the flat
  // layout is unambiguous and atoms align across neighboring inputs.
  Value::List atom;
  atom.reserve(1 + visible_edges.size() + visible_user_msgs.size() +
               corrupt_users.size());
  atom.push_back(t.z_out);
  for (int e : visible_edges) atom.push_back(t.server_messages[e]);
  for (const auto& [i, j] : visible_user_msgs) {
    atom.push_back(t.user_messages[i][j]);
  }
  for (int i : corrupt_users) atom.push_back(x[i]);
  return Value(std::move(atom));
}

FiniteDist view_distribution(const Protocol& p, const Attack& a,
                             const Value::List& x, std::size_t ceiling) {
  ViewSpec spec = ViewSpec::make(p, a);
  DistBuilder b;
  enumerate_transcripts(p, x, ceiling,
                        [&](const Transcript& t, const Rat& w) {
                          b.add(spec.project(t, x), w);
                        });
  return b.build();
}

namespace {

std::vector<Attack> all_attacks(int n, int k, int max_corrupt_servers) {
  std::vector<std::vector<int>> server_sets;
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    std::vector<int> set;
    for (int j = 0; j < k; ++j) {
      if (mask & (1ULL << j)) set.push_back(j);
    }
    if (static_cast<int>(set.size()) <= max_corrupt_servers) {
      server_sets.push_back(std::move(set));
    }
  }
  std::vector<Attack> attacks;
  for (std::uint64_t umask = 0; umask < (1ULL << n); ++umask) {
    std::vector<int> users;
    for (int i = 0; i < n; ++i) {
      if (umask & (1ULL << i)) users.push_back(i);
    }
    for (const auto& servers : server_sets) {
      attacks.push_back(Attack{users, servers});
    }
  }
  return attacks;
}

}  // namespace

ProtocolDpReport check_protocol_dp(const Protocol& p, int max_corrupt_servers,
                                   const Eps& eps, const Rat& delta,
                                   std::size_t ceiling, bool parallel) {
  p.validate();
  if (p.n > 20 || p.dag.k > 16) {
    throw SizeCeilingError(std::size_t{1} << p.n, ceiling);
  }
  const DomainPtr& X = p.input_domain();
  std::vector<Value::List> inputs;
  {
    FiniteDist full_support = FiniteDist::uniform(X);
    enumerate_input_vectors(full_support, p.n,
                            [&](const Value::List& x, const Rat&) {
                              inputs.push_back(x);
                            });
  }
  std::vector<Attack> attacks = all_attacks(p.n, p.dag.k, max_corrupt_servers);

  struct AttackResult {
    std::vector<ProtocolDpCell> cells;
  };
  std::vector<AttackResult> results(attacks.size());

  parallel_for(
      attacks.size(),
      [&](std::size_t ai) {
        const Attack& attack = attacks[ai];
        std::vector<bool> corrupt_user(p.n, false);
        for (int i : attack.corrupt_users) corrupt_user[i] = true;
        // Views for every input vector, computed once per attack.
        std::unordered_map<Value, FiniteDist, ValueHash> views;
        for (const Value::List& x : inputs) {
          views.emplace(Value(x), view_distribution(p, attack, x, ceiling));
        }
        for (const Value::List& x : inputs) {
          for (int i = 0; i < p.n; ++i) {
            if (corrupt_user[i]) continue;
            for (const Value& alt : X->elements()) {
              if (!(x[i] < alt)) continue;  // unordered pairs once
              Value::List x2 = x;
              x2[i] = alt;
              auto [pa, qa] = align_union(views.at(Value(x)),
                                          views.at(Value(x2)));
              ProtocolDpCell cell;
              cell.attack = attack;
              cell.x = x;
              cell.x_alt = x2;
              cell.differing_user = i;
              cell.report = check_closeness(pa, qa, eps, delta);
              results[ai].cells.push_back(std::move(cell));
            }
          }
        }
      },
      parallel);

  ProtocolDpReport report;
  report.verdict = Verdict::kSatisfied;
  bool have_worst = false;
  for (const AttackResult& r : results) {
    for (const ProtocolDpCell& cell : r.cells) {
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
  }
  if (!have_worst) {
    // No honest neighbor pair exists (e.g. every user corrupted); vacuous.
    report.verdict = Verdict::kSatisfied;
  }
  return report;
}

}  // namespace msdp
