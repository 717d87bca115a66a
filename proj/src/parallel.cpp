// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace proxyrb
{

void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)> &body)
{
  if (count <= 0)
  {
    return;
  }
  const auto workers = static_cast<std::int64_t>(std::max(1, jobs));
  if (workers == 1 || count == 1)
  {
    for (std::int64_t i = 0; i < count; ++i)
    {
      body(i);
    }
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex mutex;
  std::int64_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&]
  {
    for (std::int64_t i = next++; i < count; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard lock(mutex);
        if (i < failed_index)
        {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::int64_t t = 0; t < std::min(workers, count); ++t)
  {
    pool.emplace_back(work);
  }
  pool.clear();
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

std::uint64_t Rng::below(std::uint64_t bound)
{
  if (bound <= 1)
  {
    return 0;
  }
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do
  {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace proxyrb
