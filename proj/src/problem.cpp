// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/problem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "proxyrb/parallel.hpp"

namespace proxyrb
{

SampleSpace::SampleSpace(std::vector<std::vector<double>> coefficients)
{
  samples_.reserve(coefficients.size());
  const std::size_t width = coefficients.empty() ? 0 : coefficients.front().size();
  for (std::size_t i = 0; i < coefficients.size(); ++i)
  {
    if (coefficients[i].size() != width)
    {
      throw ConfigError(fmt::format("sample {} has {} coefficients, expected {}", i,
                                    coefficients[i].size(), width));
    }
    samples_.push_back({static_cast<Index>(i), std::move(coefficients[i])});
  }
}

Vector OperatorHandle::column(Index j) const
{
  const Matrix full = dense();
  return full.col(j);
}

Vector OperatorHandle::apply(const Vector &v) const
{
  Vector out(n_);
  Matrix block(kRowBlock, n_);
  for (Index b = 0; b < n_; b += kRowBlock)
  {
    const Index rows = std::min(kRowBlock, n_ - b);
    assemble_rows(b, b + rows, block.topRows(rows));
    out.segment(b, rows).noalias() = block.topRows(rows) * v;
  }
  return out;
}

Matrix OperatorHandle::project(const Matrix &q) const
{
  Matrix out = Matrix::Zero(q.cols(), q.cols());
  Matrix block(kRowBlock, n_);
  for (Index b = 0; b < n_; b += kRowBlock)
  {
    const Index rows = std::min(kRowBlock, n_ - b);
    assemble_rows(b, b + rows, block.topRows(rows));
    out.noalias() += q.middleRows(b, rows).transpose() * (block.topRows(rows) * q);
  }
  return out;
}

Matrix OperatorHandle::dense() const
{
  Matrix out(n_, n_);
  assemble_rows(0, n_, out);
  return out;
}

Vector OperatorHandle::sample(std::span<const Index> vec_indices) const
{
  std::map<Index, Vector> columns;
  Vector out(static_cast<Index>(vec_indices.size()));
  for (std::size_t k = 0; k < vec_indices.size(); ++k)
  {
    const Index idx = vec_indices[k];
    if (idx < 0 || idx >= n_ * n_)
    {
      throw ConfigError(fmt::format("operator sample index {} outside [0, {})", idx, n_ * n_));
    }
    const Index col = idx / n_;
    auto it = columns.find(col);
    if (it == columns.end())
    {
      it = columns.emplace(col, column(col)).first;
    }
    out(static_cast<Index>(k)) = it->second(idx % n_);
  }
  return out;
}

FineSolution ProblemOracle::fine_solve(const ParameterSample &w) const
{
  auto op = fine_operator(w);
  Matrix full = op->dense();
  Vector f = rhs_from_dense(w, full);
  if (has_offset())
  {
    add_offset(full);
  }
  Eigen::PartialPivLU<Matrix> lu(full);
  Vector u = lu.solve(f);
  if (!u.allFinite())
  {
    throw NumericalError(fmt::format("fine solve for sample {} produced non-finite values", w.index));
  }
  return {std::move(u), std::move(f), std::move(op)};
}

Vector ProblemOracle::rhs_from_dense(const ParameterSample &w, const Matrix &) const
{
  return rhs(w);
}

Vector ProblemOracle::offset_apply(const Vector &) const
{
  throw ConfigError(name() + " has no operator offset");
}

Matrix ProblemOracle::offset_project(const Matrix &) const
{
  throw ConfigError(name() + " has no operator offset");
}

void ProblemOracle::add_offset(Eigen::Ref<Matrix>) const
{
  throw ConfigError(name() + " has no operator offset");
}

Vector ProblemOracle::rhs_reduced(const Matrix &q, const ParameterSample &w) const
{
  return q.transpose() * rhs(w);
}

Vector ProblemOracle::apply_full(const OperatorHandle &op, const Vector &v) const
{
  Vector out = op.apply(v);
  if (has_offset())
  {
    out += offset_apply(v);
  }
  return out;
}

Matrix ProblemOracle::dense_full(const OperatorHandle &op) const
{
  Matrix full = op.dense();
  if (has_offset())
  {
    add_offset(full);
  }
  return full;
}

OperatorSamplePlan OperatorSamplePlan::from_columns(Index n, std::span<const Index> columns)
{
  OperatorSamplePlan plan;
  plan.dimension = n;
  plan.vec_indices.reserve(columns.size() * static_cast<std::size_t>(n));
  for (Index c : columns)
  {
    if (c < 0 || c >= n)
    {
      throw ConfigError(fmt::format("operator sample column {} outside [0, {})", c, n));
    }
    for (Index i = 0; i < n; ++i)
    {
      plan.vec_indices.push_back(c * n + i);
    }
  }
  return plan;
}

OperatorSamplePlan OperatorSamplePlan::random_columns(Index n, Index count, std::uint64_t seed)
{
  if (count < 1 || count > n)
  {
    throw ConfigError(fmt::format("operator sample column count {} outside [1, {}]", count, n));
  }
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  for (Index k = 0; k < count; ++k)
  {
    const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return from_columns(n, pool);
}

Index OperatorSamplePlan::default_column_count(Index n, Index expected_skeletons)
{
  const Index want = std::max<Index>(4 * expected_skeletons, 8);
  return std::clamp<Index>((want + n - 1) / n, 1, n);
}

Matrix coarse_sweep(const ProblemOracle &oracle, const SampleSpace &omega, int jobs)
{
  Matrix sc(oracle.coarse_dimension(), omega.size());
  parallel_for(omega.size(), jobs,
               [&](std::int64_t i)
               {
                 Vector u;
                 try
                 {
                   u = oracle.coarse_solve(omega[i]);
                 }
                 catch (const std::exception &e)
                 {
                   throw NumericalError(
                       fmt::format("coarse solve failed for sample {}: {}", i, e.what()));
                 }
                 if (u.size() != sc.rows() || !u.allFinite())
                 {
                   throw NumericalError(fmt::format("coarse solve failed for sample {}", i));
                 }
                 sc.col(i) = u;
               });
  return sc;
}

Matrix sample_operators(const ProblemOracle &oracle, const SampleSpace &omega,
                        const OperatorSamplePlan &plan, int jobs)
{
  if (plan.dimension != oracle.fine_dimension())
  {
    throw ConfigError("operator sample plan dimension does not match the fine operator");
  }
  Matrix out(plan.size(), omega.size());
  parallel_for(omega.size(), jobs,
               [&](std::int64_t i)
               {
                 auto op = oracle.fine_operator(omega[i]);
                 out.col(i) = op->sample(plan.vec_indices);
               });
  return out;
}

}  // namespace proxyrb
