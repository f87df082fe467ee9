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

#include "msdp/value.h"

#include <functional>

#include "msdp/errors.h"

namespace msdp {

std::int64_t Value::as_int() const {
  if (!is_int()) throw InternalError("Value::as_int on " + to_string());
  return std::get<std::int64_t>(v_);
}

const std::string& Value::as_string() const {
  if (!is_string()) throw InternalError("Value::as_string on " + to_string());
  return std::get<std::string>(v_);
}

const Value::List& Value::as_list() const {
  if (!is_list()) throw InternalError("Value::as_list on " + to_string());
  return std::get<List>(v_);
}

Value::List& Value::mutable_list() {
  if (!is_list()) throw InternalError("Value::mutable_list on " + to_string());
  return std::get<List>(v_);
}

bool Value::operator==(const Value& other) const {
  if (v_.index() != other.v_.index()) return false;
  switch (v_.index()) {
    case 0:
      return true;
    case 1:
      return std::get<std::int64_t>(v_) == std::get<std::int64_t>(other.v_);
    case 2:
      return std::get<std::string>(v_) == std::get<std::string>(other.v_);
    default: {
      const List& a = std::get<List>(v_);
      const List& b = std::get<List>(other.v_);
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] == b[i])) return false;
      }
      return true;
    }
  }
}

bool Value::operator<(const Value& other) const {
  if (v_.index() != other.v_.index()) return v_.index() < other.v_.index();
  switch (v_.index()) {
    case 0:
      return false;
    case 1:
      return std::get<std::int64_t>(v_) < std::get<std::int64_t>(other.v_);
    case 2:
      return std::get<std::string>(v_) < std::get<std::string>(other.v_);
    default: {
      const List& a = std::get<List>(v_);
      const List& b = std::get<List>(other.v_);
      std::size_t n = a.size() < b.size() ? a.size() : b.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < b[i]) return true;
        if (b[i] < a[i]) return false;
      }
      return a.size() < b.size();
    }
  }
}

namespace {

inline std::size_t mix(std::size_t h, std::size_t v) {
  // splitmix-style combine
  v += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  return h ^ v;
}

}  // namespace

std::size_t Value::hash() const {
  switch (v_.index()) {
    case 0:
      return 0x5d1f3c6a9b2e8d47ULL;
    case 1:
      return mix(1, static_cast<std::size_t>(std::get<std::int64_t>(v_)));
    case 2:
      return mix(2, std::hash<std::string>{}(std::get<std::string>(v_)));
    default: {
      std::size_t h = 3;
      for (const Value& item : std::get<List>(v_)) h = mix(h, item.hash());
      return h;
    }
  }
}

std::string Value::to_string() const {
  switch (v_.index()) {
    case 0:
      return "null";
    case 1:
      return std::to_string(std::get<std::int64_t>(v_));
    case 2:
      return std::get<std::string>(v_);
    default: {
      std::string out = "(";
      const List& items = std::get<List>(v_);
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ",";
        out += items[i].to_string();
      }
      out += ")";
      return out;
    }
  }
}

}  // namespace msdp
