// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "proxyrb/simd/kernels.hpp"

namespace proxyrb::simd
{

bool avx2_supported()
{
#if defined(__x86_64__) || defined(_M_X64)
  static const bool supported = []
  {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

Isa active_isa()
{
  static const Isa isa = []
  {
    const char *env = std::getenv("PROXYRB_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar")
    {
      return Isa::Scalar;
    }
    return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

std::string_view isa_name(Isa isa)
{
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void double_layer_row(double tx, double ty, const BoundaryNodes &src, double *out)
{
  if (active_isa() == Isa::Avx2)
  {
    avx2::double_layer_row(tx, ty, src, out);
  }
  else
  {
    scalar::double_layer_row(tx, ty, src, out);
  }
}

void attenuation_row(double tx, double ty, const double *sx, const double *sy, std::size_t n,
                     const GaussianField &mu, const LineRule &rule, double *out)
{
  if (active_isa() == Isa::Avx2)
  {
    avx2::attenuation_row(tx, ty, sx, sy, n, mu, rule, out);
  }
  else
  {
    scalar::attenuation_row(tx, ty, sx, sy, n, mu, rule, out);
  }
}

void exp_batch(const double *in, double *out, std::size_t n)
{
  if (active_isa() == Isa::Avx2)
  {
    avx2::exp_batch(in, out, n);
  }
  else
  {
    scalar::exp_batch(in, out, n);
  }
}

}  // namespace proxyrb::simd
