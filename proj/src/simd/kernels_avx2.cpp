// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// Every function in this file carries the target attribute instead of the TU being built
// with -mavx2, so no AVX2 code can leak into inline functions shared with other TUs.
#define PROXYRB_AVX2 __attribute__((target("avx2,fma")))

namespace proxyrb::simd::avx2
{

namespace
{

constexpr double kInv2Pi = 0.15915494309189533577;

// exp(x) by Cody-Waite reduction x = k ln2 + r, |r| <= ln2/2, a degree-13 Taylor polynomial
// for exp(r) and exponent-field scaling by 2^k. Max relative error is a few ulp.
PROXYRB_AVX2 inline __m256d exp4(__m256d x)
{
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 1.5 * 2^52 puts k in the low mantissa bits; shifting by 52 keeps (k + 1023) mod 2^12.
  const __m256d shifted = _mm256_add_pd(k, _mm256_set1_pd(6755399441055744.0));
  __m256i bits = _mm256_add_epi64(_mm256_castpd_si256(shifted), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_inf()), over);
  return result;
}

PROXYRB_AVX2 inline __m256d attenuation4(__m256d tx, __m256d ty, __m256d sx, __m256d sy,
                                         const GaussianField &mu, const LineRule &rule)
{
  const __m256d dx = _mm256_sub_pd(tx, sx);
  const __m256d dy = _mm256_sub_pd(ty, sy);
  const __m256d r = _mm256_sqrt_pd(_mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
  const __m256d c1 = _mm256_set1_pd(mu.c1);
  const __m256d c2 = _mm256_set1_pd(mu.c2);
  const __m256d neg_inv_w2 = _mm256_set1_pd(-mu.inv_width2);
  const __m256d sign = _mm256_set1_pd(mu.sign);
  const __m256d background = _mm256_set1_pd(mu.background);
  const __m256d amplitude = _mm256_set1_pd(mu.amplitude);

  __m256d integral = _mm256_setzero_pd();
  for (std::size_t q = 0; q < rule.order; ++q)
  {
    const __m256d tau = _mm256_set1_pd(rule.nodes[q]);
    const __m256d ex = _mm256_sub_pd(_mm256_fnmadd_pd(tau, dx, tx), c1);
    const __m256d ey = _mm256_sub_pd(_mm256_fnmadd_pd(tau, dy, ty), c2);
    const __m256d q2 = _mm256_fmadd_pd(_mm256_mul_pd(sign, ey), ey, _mm256_mul_pd(ex, ex));
    const __m256d field = _mm256_fmadd_pd(amplitude, exp4(_mm256_mul_pd(q2, neg_inv_w2)),
                                          background);
    integral = _mm256_fmadd_pd(_mm256_set1_pd(rule.weights[q]), field, integral);
  }
  const __m256d decay = exp4(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(r, integral)));
  const __m256d k = _mm256_div_pd(_mm256_mul_pd(decay, _mm256_set1_pd(kInv2Pi)), r);
  const __m256d coincident = _mm256_cmp_pd(r, _mm256_setzero_pd(), _CMP_EQ_OQ);
  return _mm256_blendv_pd(k, _mm256_setzero_pd(), coincident);
}

PROXYRB_AVX2 inline __m256d double_layer4(__m256d tx, __m256d ty, __m256d x, __m256d y,
                                          __m256d nx, __m256d ny, __m256d w)
{
  const __m256d dx = _mm256_sub_pd(tx, x);
  const __m256d dy = _mm256_sub_pd(ty, y);
  const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
  const __m256d dot = _mm256_fmadd_pd(dx, nx, _mm256_mul_pd(dy, ny));
  const __m256d k = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(kInv2Pi), dot), r2),
                                  w);
  const __m256d coincident = _mm256_cmp_pd(r2, _mm256_setzero_pd(), _CMP_EQ_OQ);
  return _mm256_blendv_pd(k, _mm256_setzero_pd(), coincident);
}

}  // namespace

PROXYRB_AVX2 void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out)
{
  const __m256d vtx = _mm256_set1_pd(tx);
  const __m256d vty = _mm256_set1_pd(ty);
  std::size_t j = 0;
  for (; j + 4 <= src.n; j += 4)
  {
    _mm256_storeu_pd(out + j,
                     double_layer4(vtx, vty, _mm256_loadu_pd(src.x + j), _mm256_loadu_pd(src.y + j),
                                   _mm256_loadu_pd(src.nx + j), _mm256_loadu_pd(src.ny + j),
                                   _mm256_loadu_pd(src.w + j)));
  }
  if (j < src.n)
  {
    // Pad the tail with the target point itself, which the kernel maps to zero.
    alignas(32) double bx[4] = {tx, tx, tx, tx}, by[4] = {ty, ty, ty, ty};
    alignas(32) double bnx[4] = {}, bny[4] = {}, bw[4] = {}, res[4];
    for (std::size_t t = 0; j + t < src.n; ++t)
    {
      bx[t] = src.x[j + t];
      by[t] = src.y[j + t];
      bnx[t] = src.nx[j + t];
      bny[t] = src.ny[j + t];
      bw[t] = src.w[j + t];
    }
    _mm256_store_pd(res, double_layer4(vtx, vty, _mm256_load_pd(bx), _mm256_load_pd(by),
                                       _mm256_load_pd(bnx), _mm256_load_pd(bny),
                                       _mm256_load_pd(bw)));
    for (std::size_t t = 0; j + t < src.n; ++t)
    {
      out[j + t] = res[t];
    }
  }
}

PROXYRB_AVX2 void attenuation_row(double tx, double ty, const double *sx, const double *sy,
                                  std::size_t n, const GaussianField &mu, const LineRule &rule,
                                  double *out)
{
  const __m256d vtx = _mm256_set1_pd(tx);
  const __m256d vty = _mm256_set1_pd(ty);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
  {
    _mm256_storeu_pd(out + j, attenuation4(vtx, vty, _mm256_loadu_pd(sx + j),
                                           _mm256_loadu_pd(sy + j), mu, rule));
  }
  if (j < n)
  {
    alignas(32) double bx[4] = {tx, tx, tx, tx}, by[4] = {ty, ty, ty, ty}, res[4];
    for (std::size_t t = 0; j + t < n; ++t)
    {
      bx[t] = sx[j + t];
      by[t] = sy[j + t];
    }
    _mm256_store_pd(res, attenuation4(vtx, vty, _mm256_load_pd(bx), _mm256_load_pd(by), mu, rule));
    for (std::size_t t = 0; j + t < n; ++t)
    {
      out[j + t] = res[t];
    }
  }
}

PROXYRB_AVX2 void exp_batch(const double *in, double *out, std::size_t n)
{
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
  {
    _mm256_storeu_pd(out + j, exp4(_mm256_loadu_pd(in + j)));
  }
  if (j < n)
  {
    alignas(32) double buf[4] = {}, res[4];
    for (std::size_t t = 0; j + t < n; ++t)
    {
      buf[t] = in[j + t];
    }
    _mm256_store_pd(res, exp4(_mm256_load_pd(buf)));
    for (std::size_t t = 0; j + t < n; ++t)
    {
      out[j + t] = res[t];
    }
  }
}

}  // namespace proxyrb::simd::avx2

#else

namespace proxyrb::simd::avx2
{

void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out)
{
  scalar::double_layer_row(tx, ty, src, out);
}

void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out)
{
  scalar::attenuation_row(tx, ty, sx, sy, n, mu, rule, out);
}

void exp_batch(const double *in, double *out, std::size_t n)
{
  scalar::exp_batch(in, out, n);
}

}  // namespace proxyrb::simd::avx2

#endif
