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

#ifndef MSDP_PARALLEL_H_
#define MSDP_PARALLEL_H_

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace msdp {

// Runs fn(0..count-1) across hardware threads. Jobs must be independent;
// callers merge results afterwards in index order so reports stay
// deterministic. Exceptions are reraised on the calling thread.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn,
                         bool parallel = true) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (!parallel || count == 1 || hw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t workers = hw < count ? hw : count;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count;
             i = next.fetch_add(1)) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace msdp

#endif  // MSDP_PARALLEL_H_
