// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/synthetic_affine.hpp"

#include <cmath>

#include <fmt/format.h>

#include "proxyrb/parallel.hpp"

namespace proxyrb::synthetic
{

namespace
{

double scalar_of(const ParameterSample &w)
{
  if (w.coefficients.size() != 1)
  {
    throw ConfigError(fmt::format("synthetic sample {} needs exactly one coefficient", w.index));
  }
  return w.coefficients[0];
}

Matrix random_block(Index n, double scale, Rng &rng)
{
  Matrix m(n, n);
  for (Index j = 0; j < n; ++j)
  {
    for (Index i = 0; i < n; ++i)
    {
      m(i, j) = scale * rng.uniform(-1.0, 1.0);
    }
  }
  return m;
}

double condition(const Matrix &m)
{
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector &s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
}

bool well_conditioned(const AffineFamily &f)
{
  for (int k = 0; k <= 100; ++k)
  {
    if (!(condition(f.full(k / 100.0)) < 1e6))
    {
      return false;
    }
  }
  return true;
}

}  // namespace

double chebyshev(int j, double x)
{
  double t0 = 1.0, t1 = x;
  if (j == 0)
  {
    return t0;
  }
  for (int k = 1; k < j; ++k)
  {
    const double t2 = 2.0 * x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

Matrix AffineFamily::varying(double w) const
{
  Matrix b = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < terms.size(); ++j)
  {
    b += chebyshev(static_cast<int>(j) + 1, 2.0 * w - 1.0) * terms[j];
  }
  return b;
}

AffineFamily AffineFamily::leading(Index k) const
{
  AffineFamily out;
  out.n = k;
  out.offset = offset.topLeftCorner(k, k);
  for (const auto &b : terms)
  {
    out.terms.push_back(b.topLeftCorner(k, k));
  }
  out.source = source.head(k);
  return out;
}

AffineFamily make_affine_family(Index n, Index r, std::uint64_t seed)
{
  if (n < 4 || r < 1 || r > n)
  {
    throw ConfigError(fmt::format("synthetic family needs n >= 4 and 1 <= r <= n (got n={}, r={})",
                                  n, r));
  }
  Rng rng(seed);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int attempt = 0; attempt < 100; ++attempt)
  {
    AffineFamily f;
    f.n = n;
    f.offset = Matrix::Identity(n, n) + random_block(n, 0.5 * inv, rng);
    for (Index j = 0; j < r; ++j)
    {
      f.terms.push_back(random_block(n, 0.3 * inv, rng));
    }
    f.source.resize(n);
    for (Index i = 0; i < n; ++i)
    {
      f.source(i) = rng.uniform(-1.0, 1.0);
    }
    if (well_conditioned(f) && well_conditioned(f.leading(n / 2)))
    {
      return f;
    }
  }
  throw NumericalError("could not draw a well-conditioned synthetic family in 100 tries");
}

SampleSpace affine_samples(Index p, std::uint64_t seed)
{
  if (p < 1)
  {
    throw ConfigError("synthetic sample count must be >= 1");
  }
  Rng rng(seed);
  std::vector<std::vector<double>> coeffs(static_cast<std::size_t>(p));
  for (auto &c : coeffs)
  {
    c = {rng.uniform()};
  }
  return SampleSpace(std::move(coeffs));
}

SyntheticAffineOracle::SyntheticAffineOracle(AffineFamily family, RhsMode mode)
    : fine_(std::move(family)), coarse_(fine_.leading(fine_.n / 2)), mode_(mode)
{
}

Vector SyntheticAffineOracle::coarse_solve(const ParameterSample &w) const
{
  const double s = scalar_of(w);
  return coarse_.full(s).partialPivLu().solve((1.0 + s) * coarse_.source);
}

std::shared_ptr<const OperatorHandle> SyntheticAffineOracle::fine_operator(const ParameterSample &w) const
{
  return std::make_shared<SyntheticOperator>(fine_.varying(scalar_of(w)));
}

Vector SyntheticAffineOracle::rhs(const ParameterSample &w) const
{
  return (1.0 + scalar_of(w)) * fine_.source;
}

}  // namespace proxyrb::synthetic
