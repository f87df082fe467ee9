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

#ifndef MSDP_ERRORS_H_
#define MSDP_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msdp {

// Two distributions (or a distribution and a query) refer to different
// domains where a shared one is required.
class DomainMismatchError : public std::invalid_argument {
 public:
  explicit DomainMismatchError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Conditioning or posterior computation hit an event of probability zero.
// Callers decide the fallback; we never silently substitute a uniform.
class ZeroMassError : public std::runtime_error {
 public:
  explicit ZeroMassError(const std::string& what) : std::runtime_error(what) {}
};

// An exact enumeration would exceed the configured atom ceiling. Callers
// may retry in Monte-Carlo mode.
class SizeCeilingError : public std::runtime_error {
 public:
  SizeCeilingError(std::size_t needed, std::size_t ceiling)
      : std::runtime_error("enumeration exceeds atom ceiling (needs > " +
                           std::to_string(needed) + ", ceiling " +
                           std::to_string(ceiling) + "); use sampling mode"),
        needed_(needed),
        ceiling_(ceiling) {}
  std::size_t needed() const { return needed_; }
  std::size_t ceiling() const { return ceiling_; }

 private:
  std::size_t needed_;
  std::size_t ceiling_;
};

// Malformed configuration or scenario input. Messages carry field paths.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A guaranteed-feasible step failed; indicates a bug, reported with context.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace msdp

#endif  // MSDP_ERRORS_H_
