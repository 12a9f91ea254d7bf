// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <type_traits>
#include <vector>

namespace hstbeam::detail {

/// Evaluates fn(0..n-1) and returns the results in index order. With
/// `parallel` set, contiguous index blocks run on separate threads; the
/// output is identical either way.
template <class Fn>
auto ordered_map(std::size_t n, Fn&& fn, bool parallel) {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(n);
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
  const std::size_t block = (n + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < n; begin += block) {
    const std::size_t end = std::min(n, begin + block);
    jobs.push_back(std::async(std::launch::async, [&out, &fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

}  // namespace hstbeam::detail
