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

#ifndef MSDP_VALUE_H_
#define MSDP_VALUE_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

namespace msdp {

// The universal symbol type: domain elements, messages, protocol outputs,
// and online-algorithm states are all Values. The null alternative marks
// a slot that was erased (or never filled) in a structured state.
//
// Values are totally ordered (null < int < string < list, lists
// lexicographic) so enumerated domains have a canonical element order.
class Value {
 public:
  using List = std::vector<Value>;

  Value() : v_(std::monostate{}) {}
  Value(std::int64_t i) : v_(i) {}           // NOLINT: implicit by design
  Value(int i) : v_(std::int64_t{i}) {}      // NOLINT
  Value(const char* s) : v_(std::string(s)) {}  // NOLINT
  Value(std::string s) : v_(std::move(s)) {}    // NOLINT
  Value(List items) : v_(std::move(items)) {}   // NOLINT

  static Value list(std::initializer_list<Value> items) {
    return Value(List(items));
  }

  bool is_null() const { return v_.index() == 0; }
  bool is_int() const { return v_.index() == 1; }
  bool is_string() const { return v_.index() == 2; }
  bool is_list() const { return v_.index() == 3; }

  std::int64_t as_int() const;
  const std::string& as_string() const;
  const List& as_list() const;
  List& mutable_list();

  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }
  bool operator<(const Value& other) const;

  std::size_t hash() const;
  std::string to_string() const;

 private:
  std::variant<std::monostate, std::int64_t, std::string, List> v_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace msdp

#endif  // MSDP_VALUE_H_
