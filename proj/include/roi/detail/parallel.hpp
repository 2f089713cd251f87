// Copyright 2026 The roi-compose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roi {

template <typename Fn>
void parallel_rows(int rows, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(1, rows));
  if (workers == 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < rows; r = next++) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace roi
