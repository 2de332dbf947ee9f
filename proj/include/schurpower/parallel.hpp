#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace schurpower {

// Runs fn(i, worker) for i in [0, count) on up to `threads` threads, worker
// in [0, threads).  Work is handed out dynamically; results must be written
// to per-index slots.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
    return;
  }
  const unsigned t = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t i; !failed && (i = next++) < count;) fn(i, id);
    } catch (...) {
      if (!failed.exchange(true)) err = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker, k);
  worker(0u);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace schurpower
