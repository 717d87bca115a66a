// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_SIMD_KERNELS_HPP
#define PROXYRB_SIMD_KERNELS_HPP

#include <cstddef>
#include <string_view>

// Data-parallel inner loops of operator assembly. Every kernel has a scalar reference in
// proxyrb::simd::scalar and, on x86-64, an AVX2+FMA variant in proxyrb::simd::avx2. The
// unqualified entry points dispatch at runtime to the best variant the CPU supports; setting
// PROXYRB_SIMD=scalar in the environment forces the reference path.

namespace proxyrb::simd
{

enum class Isa
{
  Scalar,
  Avx2
};

Isa active_isa();
std::string_view isa_name(Isa isa);
bool avx2_supported();

// Structure-of-arrays view of boundary quadrature nodes.
struct BoundaryNodes
{
  const double *x;
  const double *y;
  const double *nx;
  const double *ny;
  const double *w;
  std::size_t n;
};

// mu(p) = background + amplitude * exp(-((p1 - c1)^2 + sign * (p2 - c2)^2) * inv_width2)
struct GaussianField
{
  double background;
  double amplitude;
  double c1;
  double c2;
  double inv_width2;
  double sign;
};

// Quadrature on [0, 1].
struct LineRule
{
  const double *nodes;
  const double *weights;
  std::size_t order;
};

// out[j] = w_j / (2 pi) * ((t - y_j) . n_j) / |t - y_j|^2, and 0 where t coincides with y_j.
void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out);

// out[j] = exp(-r_j * I_j) / (2 pi r_j), r_j = |t - s_j|, I_j = sum_q w_q mu(t - tau_q (t - s_j)).
// Coincident points give 0.
void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out);

void exp_batch(const double *in, double *out, std::size_t n);

namespace scalar
{
void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out);
void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out);
void exp_batch(const double *in, double *out, std::size_t n);
}  // namespace scalar

namespace avx2
{
// Callers must check avx2_supported() first.
void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out);
void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out);
void exp_batch(const double *in, double *out, std::size_t n);
}  // namespace avx2

}  // namespace proxyrb::simd

#endif  // PROXYRB_SIMD_KERNELS_HPP
