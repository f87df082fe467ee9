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

#ifndef MSDP_PROTOCOL_H_
#define MSDP_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msdp/dist.h"
#include "msdp/randomizer.h"
#include "msdp/rng.h"

namespace msdp {

// Server communication DAG. Servers are 0-based and named in topological
// order: every edge goes from a lower index to a higher one, and the last
// server is the sink that emits z_out.
struct CommDag {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // sorted lexicographically

  void validate() const;
  std::vector<int> in_edges(int server) const;   // edge indices, sorted
  std::vector<int> out_edges(int server) const;  // edge indices, sorted
};

// A server's channel from (user messages, incoming server messages) to a
// distribution over what it emits. Channels are pure functions returning
// exact distributions, so enumeration can introspect them; free-form
// sampling code is not accepted in audit mode.
class ServerAlg {
 public:
  using Core = std::function<FiniteDist(const Value::List& user_msgs,
                                        const Value::List& incoming)>;

  ServerAlg(std::string kind, Core core, bool emits_tuple = false);

  const std::string& kind() const { return kind_; }

  // Sink servers emit z_out directly. Non-sink servers emit one message per
  // out-edge; unless the core already produces per-edge tuples, its value is
  // replicated to every out-edge.
  FiniteDist apply(const Value::List& user_msgs, const Value::List& incoming,
                   std::size_t out_degree, bool is_sink) const;

 private:
  std::string kind_;
  Core core_;
  bool emits_tuple_;
};

// Bundles everything received into one tuple; a singleton bundle collapses
// to the bare value.
ServerAlg forward_server();

struct LinearServerSpec {
  int user_sign = 1;
  int server_sign = 1;
  // Inclusive range; user messages outside it contribute zero.
  std::optional<std::pair<std::int64_t, std::int64_t>> user_clamp;
  std::optional<FiniteDist> noise;  // integer-valued, added
  std::int64_t offset = 0;
};

// offset + user_sign * sum(user msgs, clamped) + server_sign * sum(incoming)
// + noise. Incoming bundles are flattened to their integer leaves.
ServerAlg linear_server(LinearServerSpec spec);

// XOR of all user bits and incoming bits, then flipped with probability
// noise_flip.
ServerAlg xor_server(const Rat& noise_flip);

ServerAlg constant_server(Value v);

// Non-interactive multi-server protocol: per-user randomizers, per-server
// algorithms, and the communication DAG.
struct Protocol {
  int n = 0;
  std::vector<Randomizer> randomizers;  // size n
  std::vector<ServerAlg> servers;       // size k
  CommDag dag;

  const DomainPtr& input_domain() const;
  void validate() const;
};

struct Attack {
  std::vector<int> corrupt_users;    // sorted, 0-based
  std::vector<int> corrupt_servers;  // sorted, 0-based
};

struct Transcript {
  std::vector<Value::List> user_messages;  // [user][server]
  std::vector<Value> server_messages;      // by dag edge index
  Value z_out;
};

// One sampled execution: users first, then servers in topological order.
Transcript execute(const Protocol& p, const Value::List& x, Rng& rng);

// Walks every message realization; visit receives the transcript and its
// exact probability. Throws SizeCeilingError past `ceiling` leaves.
void enumerate_transcripts(
    const Protocol& p, const Value::List& x, std::size_t ceiling,
    const std::function<void(const Transcript&, const Rat&)>& visit);

FiniteDist output_distribution(const Protocol& p, const Value::List& x,
                               std::size_t ceiling);
// Output distribution with inputs drawn i.i.d. from the prior.
FiniteDist output_distribution(const Protocol& p, const FiniteDist& prior,
                               std::size_t ceiling);

// The index sets an adversary observes under an attack: z_out, every
// message not between two honest parties, and corrupted users' inputs.
struct ViewSpec {
  std::vector<int> visible_edges;                       // dag edge indices
  std::vector<std::pair<int, int>> visible_user_msgs;   // (user, server)
  std::vector<int> corrupt_users;

  static ViewSpec make(const Protocol& p, const Attack& a);
  Value project(const Transcript& t, const Value::List& x) const;
};

FiniteDist view_distribution(const Protocol& p, const Attack& a,
                             const Value::List& x, std::size_t ceiling);

struct ProtocolDpCell {
  Attack attack;
  Value::List x;
  Value::List x_alt;
  int differing_user = -1;
  ClosenessReport report;
};

struct ProtocolDpReport {
  Verdict verdict = Verdict::kIndeterminate;
  std::size_t cells = 0;
  ProtocolDpCell worst;  // maximal delta excess
};

// Exhaustive multi-server DP check: every attack with at most
// max_corrupt_servers corrupted servers, every replace-one neighbor pair on
// an honest index, exact view closeness for each.
ProtocolDpReport check_protocol_dp(const Protocol& p, int max_corrupt_servers,
                                   const Eps& eps, const Rat& delta,
                                   std::size_t ceiling, bool parallel = true);

}  // namespace msdp

#endif  // MSDP_PROTOCOL_H_
