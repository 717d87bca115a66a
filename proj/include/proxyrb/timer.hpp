// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_TIMER_HPP
#define PROXYRB_TIMER_HPP

#include <chrono>

namespace proxyrb
{

class Stopwatch
{
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Seconds since the last lap (or construction).
  double lap()
  {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace proxyrb

#endif  // PROXYRB_TIMER_HPP
