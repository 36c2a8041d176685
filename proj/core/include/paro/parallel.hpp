// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_PARALLEL_HPP
#define PARO_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace paro
{

// Worker count for a request of `threads` (0 = hardware concurrency), never more than the
// number of tasks.
inline std::size_t resolve_threads(std::size_t threads, std::size_t tasks)
{
  std::size_t n = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, tasks));
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks are handed out
// dynamically; the first exception thrown by any task is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn &&fn)
{
  const std::size_t workers = resolve_threads(threads, count);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; i++)
    {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]()
  {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        fn(i);
      }
      catch (...)
      {
        std::lock_guard lock(error_mutex);
        if (!error)
        {
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; w++)
  {
    pool.emplace_back(work);
  }
  work();
  for (auto &t : pool)
  {
    t.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace paro

#endif  // PARO_PARALLEL_HPP
