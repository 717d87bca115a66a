// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_PARALLEL_HPP
#define PROXYRB_PARALLEL_HPP

#include <cstdint>
#include <functional>
#include <random>

namespace proxyrb
{

// Runs body(0..count) on up to `jobs` threads. Each index must write only to its own
// preassigned output slot. If any body throws, the exception from the lowest failing index
// is rethrown after all workers finish.
void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)> &body);

// std::mt19937_64 has a standardized output sequence; the std distributions do not, so the
// mapping to doubles and bounded integers is done here.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

}  // namespace proxyrb

#endif  // PROXYRB_PARALLEL_HPP
