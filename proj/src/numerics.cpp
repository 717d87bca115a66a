// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace proxyrb
{

namespace
{

// Downdated column norms lose accuracy as (norm / reference)^2 approaches machine epsilon;
// below this squared ratio the norm is recomputed from the trailing column.
constexpr double kNormRecomputeRatio = 1e-7;

struct Stop
{
  bool relative;
  double value;
};

CpqrFactors factorize(const Matrix &m, Stop stop, bool want_factors)
{
  const Index rows = m.rows(), cols = m.cols();
  Matrix a = m;
  Vector tau = Vector::Zero(std::min(rows, cols));
  std::vector<Index> perm(cols);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<double> norms(cols), reference(cols);
  for (Index j = 0; j < cols; ++j)
  {
    norms[j] = reference[j] = a.col(j).norm();
  }

  // Reflections are accumulated over panels of up to kPanel steps. Inside a panel, rows at or
  // below the current step of the trailing columns hold their panel-start values and the
  // pending update is a -= V F^T; rows above it are kept current.
  constexpr Index kPanel = 32;
  Matrix v(rows, kPanel);
  Matrix f(cols, kPanel);
  Vector vtv(kPanel);

  CpqrFactors out;
  auto &sel = out.selection;
  double threshold = stop.value;
  const Index steps = std::min(rows, cols);
  Index k = 0;
  bool stopped = false;
  std::vector<Index> stale;
  while (k < steps && !stopped)
  {
    Index jb = 0;
    v.setZero();
    f.setZero();
    while (k < steps && jb < kPanel)
    {
      Index p = k;
      for (Index j = k + 1; j < cols; ++j)
      {
        if (norms[j] > norms[p] || (norms[j] == norms[p] && perm[j] < perm[p]))
        {
          p = j;
        }
      }
      if (p != k)
      {
        a.col(k).swap(a.col(p));
        f.row(k).swap(f.row(p));
        std::swap(norms[k], norms[p]);
        std::swap(reference[k], reference[p]);
        std::swap(perm[k], perm[p]);
      }

      if (jb > 0)
      {
        a.col(k).tail(rows - k).noalias() -=
            v.block(k, 0, rows - k, jb) * f.row(k).head(jb).transpose();
      }
      const double rkk = a.col(k).tail(rows - k).norm();
      if (k == 0 && stop.relative)
      {
        if (rkk == 0.0)
        {
          throw NumericalError("cpqr: degenerate input (all-zero matrix)");
        }
        threshold = stop.value * rkk;
      }
      sel.diagonals.push_back(rkk);
      if (rkk == 0.0 || rkk < threshold)
      {
        stopped = true;
        break;
      }

      double beta;
      a.col(k).tail(rows - k).makeHouseholderInPlace(tau(k), beta);
      a(k, k) = beta;
      v(k, jb) = 1.0;
      v.col(jb).tail(rows - k - 1) = a.col(k).tail(rows - k - 1);

      const Index trailing = cols - k - 1;
      if (trailing > 0)
      {
        const auto vk = v.col(jb).tail(rows - k);
        auto fk = f.col(jb).tail(trailing);
        fk.noalias() = a.bottomRightCorner(rows - k, trailing).transpose() * vk;
        if (jb > 0)
        {
          vtv.head(jb).noalias() = v.block(k, 0, rows - k, jb).transpose() * vk;
          fk.noalias() -= f.block(k + 1, 0, trailing, jb) * vtv.head(jb);
        }
        fk *= tau(k);
        a.row(k).tail(trailing).noalias() -=
            v.row(k).head(jb + 1) * f.block(k + 1, 0, trailing, jb + 1).transpose();
      }
      ++sel.kept;
      ++jb;

      for (Index j = k + 1; j < cols; ++j)
      {
        if (norms[j] == 0.0)
        {
          continue;
        }
        const double t = std::abs(a(k, j)) / norms[j];
        const double shrink = std::max(0.0, (1.0 - t) * (1.0 + t));
        const double ratio = norms[j] / reference[j];
        if (shrink * ratio * ratio <= kNormRecomputeRatio)
        {
          stale.push_back(j);
        }
        else
        {
          norms[j] *= std::sqrt(shrink);
        }
      }
      ++k;
      if (!stale.empty())
      {
        break;
      }
    }

    if (!stopped && jb > 0 && k < cols)
    {
      a.bottomRightCorner(rows - k, cols - k).noalias() -=
          v.block(k, 0, rows - k, jb) * f.block(k, 0, cols - k, jb).transpose();
    }
    for (Index j : stale)
    {
      norms[j] = reference[j] = a.col(j).tail(rows - k).norm();
    }
    stale.clear();
  }

  // Columns left unfactorized are ordered by residual norm, ties to the lowest index.
  std::vector<Index> order(cols - sel.kept);
  std::iota(order.begin(), order.end(), sel.kept);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y)
                   {
                     if (norms[x] != norms[y])
                     {
                       return norms[x] > norms[y];
                     }
                     return perm[x] < perm[y];
                   });
  sel.permutation.assign(perm.begin(), perm.begin() + sel.kept);
  for (Index j : order)
  {
    sel.permutation.push_back(perm[j]);
  }

  if (want_factors)
  {
    const Index kept = sel.kept;
    out.q = Matrix::Identity(rows, kept);
    Vector workspace(std::max<Index>(kept, 1));
    for (Index j = kept - 1; j >= 0; --j)
    {
      out.q.bottomRows(rows - j)
          .applyHouseholderOnTheLeft(a.col(j).tail(rows - j - 1), tau(j), workspace.data());
    }
    // R is reported in the order of sel.permutation.
    out.r = Matrix::Zero(kept, cols);
    std::vector<Index> position(cols);
    for (Index j = 0; j < cols; ++j)
    {
      position[perm[j]] = j;
    }
    for (Index j = 0; j < cols; ++j)
    {
      const Index w = position[sel.permutation[j]];
      const Index len = std::min<Index>(kept, w + 1);
      out.r.col(j).head(len) = a.col(w).head(len);
    }
  }
  return out;
}

void check_threshold(double eps, const char *what)
{
  if (!(eps > 0.0 && eps < 1.0))
  {
    throw ConfigError(fmt::format("{}: threshold {} outside (0, 1)", what, eps));
  }
}

}  // namespace

CpqrSelection cpqr_select(const Matrix &m, double eps)
{
  check_threshold(eps, "cpqr_select");
  return factorize(m, {true, eps}, false).selection;
}

CpqrSelection cpqr_select_absolute(const Matrix &m, double threshold)
{
  if (!(threshold >= 0.0))
  {
    throw ConfigError("cpqr_select_absolute: negative threshold");
  }
  if (m.size() == 0)
  {
    return {};
  }
  return factorize(m, {false, threshold}, false).selection;
}

CpqrFactors cpqr_factor(const Matrix &m, double eps)
{
  check_threshold(eps, "cpqr_factor");
  return factorize(m, {true, eps}, true);
}

TruncatedBasis truncated_svd(const Matrix &m, double eps)
{
  check_threshold(eps, "truncated_svd");
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0)
  {
    throw NumericalError("truncated_svd: zero matrix");
  }
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(m, Eigen::ComputeThinU);
  const Vector &sigma = svd.singularValues();
  Index keep = 0;
  while (keep < sigma.size() && sigma(keep) >= eps * sigma(0))
  {
    ++keep;
  }
  return {svd.matrixU().leftCols(keep), sigma.head(keep)};
}

Matrix least_squares(const Matrix &a, const Matrix &b)
{
  if (a.rows() != b.rows())
  {
    throw ConfigError(fmt::format("least_squares: row mismatch ({} vs {})", a.rows(), b.rows()));
  }
  Matrix x = Matrix::Zero(a.cols(), b.cols());
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0)
  {
    return x;
  }
  // Tall problems go through a blocked QR first so that the SVD only sees the small R factor.
  Matrix u, v;
  Vector sigma;
  if (a.rows() > 2 * a.cols())
  {
    const Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    sigma = svd.singularValues();
    v = svd.matrixV();
    u = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    u = u * svd.matrixU();
  }
  else
  {
    const Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma = svd.singularValues();
    u = svd.matrixU();
    v = svd.matrixV();
  }
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > 1e-12 * sigma(0))
  {
    ++rank;
  }
  Matrix coeff = u.leftCols(rank).transpose() * b;
  coeff = sigma.head(rank).cwiseInverse().asDiagonal() * coeff;
  x.noalias() = v.leftCols(rank) * coeff;
  return x;
}

Matrix orthonormal_range(const Matrix &cols)
{
  Matrix basis(cols.rows(), cols.cols());
  if (cols.size() == 0)
  {
    return basis.leftCols(0);
  }
  const double scale = cols.colwise().norm().maxCoeff();
  Index rank = 0;
  for (Index j = 0; j < cols.cols(); ++j)
  {
    Vector v = cols.col(j);
    for (int pass = 0; pass < 2; ++pass)
    {
      for (Index i = 0; i < rank; ++i)
      {
        v -= basis.col(i).dot(v) * basis.col(i);
      }
    }
    const double nv = v.norm();
    if (nv > 1e-12 * scale)
    {
      basis.col(rank++) = v / nv;
    }
  }
  return basis.leftCols(rank);
}

Matrix project_out(const Matrix &samples, const Matrix &skeleton_cols)
{
  if (samples.rows() != skeleton_cols.rows())
  {
    throw ConfigError(fmt::format("project_out: row mismatch ({} vs {})", samples.rows(),
                                  skeleton_cols.rows()));
  }
  const Matrix u = orthonormal_range(skeleton_cols);
  Matrix res = samples;
  for (int pass = 0; pass < 2; ++pass)
  {
    res.noalias() -= u * (u.transpose() * res);
  }
  return res;
}

}  // namespace proxyrb
