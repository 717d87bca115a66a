// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "proxyrb/simd/kernels.hpp"

namespace proxyrb::simd::scalar
{

void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out)
{
  constexpr double inv2pi = 0.5 * std::numbers::inv_pi;
  for (std::size_t j = 0; j < src.n; ++j)
  {
    const double dx = tx - src.x[j];
    const double dy = ty - src.y[j];
    const double r2 = dx * dx + dy * dy;
    out[j] = r2 > 0.0 ? inv2pi * (dx * src.nx[j] + dy * src.ny[j]) / r2 * src.w[j] : 0.0;
  }
}

void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out)
{
  constexpr double inv2pi = 0.5 * std::numbers::inv_pi;
  for (std::size_t j = 0; j < n; ++j)
  {
    const double dx = tx - sx[j];
    const double dy = ty - sy[j];
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r == 0.0)
    {
      out[j] = 0.0;
      continue;
    }
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.order; ++q)
    {
      const double tau = rule.nodes[q];
      const double ex = tx - tau * dx - mu.c1;
      const double ey = ty - tau * dy - mu.c2;
      const double arg = -(ex * ex + mu.sign * ey * ey) * mu.inv_width2;
      integral += rule.weights[q] * (mu.background + mu.amplitude * std::exp(arg));
    }
    out[j] = std::exp(-r * integral) * inv2pi / r;
  }
}

void exp_batch(const double *in, double *out, std::size_t n)
{
  for (std::size_t j = 0; j < n; ++j)
  {
    out[j] = std::exp(in[j]);
  }
}

}  // namespace proxyrb::simd::scalar
