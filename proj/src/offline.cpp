// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/offline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "proxyrb/parallel.hpp"
#include "proxyrb/timer.hpp"

namespace proxyrb
{

void Thresholds::validate() const
{
  if (!(epsilon > 0.0 && epsilon < 1.0))
  {
    throw ConfigError(fmt::format("epsilon {} outside (0, 1)", epsilon));
  }
  if (!(eta > 0.0))
  {
    throw ConfigError(fmt::format("eta {} must be positive", eta));
  }
}

std::vector<Index> SkeletonSet::operator_indices() const
{
  std::vector<Index> all = indices;
  all.insert(all.end(), additional.begin(), additional.end());
  return all;
}

std::vector<Index> get_skeletons(const Matrix &coarse_solutions, double eps)
{
  const CpqrSelection sel = cpqr_select(coarse_solutions, eps);
  return {sel.permutation.begin(), sel.permutation.begin() + sel.kept};
}

namespace
{

std::vector<FineSolution> fine_solve_all(const ProblemOracle &oracle, const SampleSpace &omega,
                                         std::span<const Index> which, int jobs)
{
  std::vector<FineSolution> out(which.size());
  parallel_for(static_cast<std::int64_t>(which.size()), jobs,
               [&](std::int64_t j)
               {
                 const Index i = which[static_cast<std::size_t>(j)];
                 if (i < 0 || i >= omega.size())
                 {
                   throw ConfigError(fmt::format("skeleton index {} outside the sample space", i));
                 }
                 try
                 {
                   out[static_cast<std::size_t>(j)] = oracle.fine_solve(omega[i]);
                 }
                 catch (const ConfigError &)
                 {
                   throw;
                 }
                 catch (const std::exception &e)
                 {
                   throw NumericalError(
                       fmt::format("fine solve failed for sample {}: {}", i, e.what()));
                 }
               });
  return out;
}

void append_columns(Matrix &m, const Matrix &extra)
{
  if (extra.cols() == 0)
  {
    return;
  }
  if (m.cols() == 0)
  {
    m = extra;
    return;
  }
  Matrix joined(m.rows(), m.cols() + extra.cols());
  joined << m, extra;
  m = std::move(joined);
}

}  // namespace

SkeletonSet solve_fine_skeletons(const ProblemOracle &oracle, const SampleSpace &omega,
                                 std::span<const Index> skeletons, int jobs)
{
  if (skeletons.empty())
  {
    throw ConfigError("solve_fine_skeletons: empty skeleton set");
  }
  auto solved = fine_solve_all(oracle, omega, skeletons, jobs);
  SkeletonSet out;
  out.indices.assign(skeletons.begin(), skeletons.end());
  const Index n = oracle.fine_dimension();
  out.solutions.resize(n, static_cast<Index>(solved.size()));
  out.rhs.resize(n, static_cast<Index>(solved.size()));
  for (std::size_t j = 0; j < solved.size(); ++j)
  {
    out.solutions.col(static_cast<Index>(j)) = solved[j].solution;
    out.rhs.col(static_cast<Index>(j)) = solved[j].rhs;
    out.operators.push_back(std::move(solved[j].op));
  }
  return out;
}

SkeletonSet additional_skeletons(const Matrix &op_samples, SkeletonSet skeletons,
                                 const Thresholds &thresholds, const ProblemOracle &oracle,
                                 const SampleSpace &omega, bool append_solutions, int jobs)
{
  thresholds.validate();
  const double a = op_samples.colwise().norm().maxCoeff();
  if (a == 0.0)
  {
    return skeletons;
  }
  const std::vector<Index> current = skeletons.operator_indices();
  const Matrix residual = project_out(op_samples, op_samples(Eigen::all, current));
  const CpqrSelection sel =
      cpqr_select_absolute(residual, thresholds.eta * thresholds.epsilon * a);

  std::vector<Index> promoted;
  for (Index k = 0; k < sel.kept; ++k)
  {
    const Index idx = sel.permutation[static_cast<std::size_t>(k)];
    if (std::find(current.begin(), current.end(), idx) == current.end())
    {
      promoted.push_back(idx);
    }
  }
  if (promoted.empty())
  {
    return skeletons;
  }

  auto solved = fine_solve_all(oracle, omega, promoted, jobs);
  const Index n = oracle.fine_dimension();
  Matrix new_solutions(n, static_cast<Index>(solved.size()));
  Matrix new_rhs(n, static_cast<Index>(solved.size()));
  for (std::size_t j = 0; j < solved.size(); ++j)
  {
    new_solutions.col(static_cast<Index>(j)) = solved[j].solution;
    new_rhs.col(static_cast<Index>(j)) = solved[j].rhs;
    skeletons.operators.push_back(std::move(solved[j].op));
  }
  if (append_solutions)
  {
    append_columns(skeletons.solutions, new_solutions);
  }
  append_columns(skeletons.rhs, new_rhs);
  skeletons.additional.insert(skeletons.additional.end(), promoted.begin(), promoted.end());
  return skeletons;
}

TruncatedBasis build_reduced_basis(const SkeletonSet &skeletons, double eps)
{
  return truncated_svd(skeletons.solutions, eps);
}

Matrix build_mixing_matrix(const Matrix &op_samples, std::span<const Index> skeleton_cols,
                           std::vector<std::string> *warnings)
{
  const std::vector<Index> cols(skeleton_cols.begin(), skeleton_cols.end());
  if (warnings != nullptr && op_samples.rows() < static_cast<Index>(cols.size()))
  {
    warnings->push_back(fmt::format(
        "mixing regression underdetermined: {} operator samples for {} skeleton operators; "
        "using the minimum-norm solution",
        op_samples.rows(), cols.size()));
  }
  return least_squares(op_samples(Eigen::all, cols), op_samples);
}

Matrix project_skeleton_operators(const SkeletonSet &skeletons, const Matrix &basis, int jobs)
{
  const Index nrb = basis.cols();
  Matrix out(nrb * nrb, skeletons.operator_count());
  parallel_for(skeletons.operator_count(), jobs,
               [&](std::int64_t j)
               {
                 const Matrix p = skeletons.operators[static_cast<std::size_t>(j)]->project(basis);
                 out.col(j) = p.reshaped();
               });
  return out;
}

OfflineResult run_offline(const ProblemOracle &oracle, const SampleSpace &omega,
                          const OfflineOptions &options)
{
  options.thresholds.validate();
  if (omega.empty())
  {
    throw ConfigError("run_offline: empty sample space");
  }
  const double eps = options.thresholds.epsilon;
  OfflineResult result;
  OfflineTimings &t = result.model.timings;
  Stopwatch total, lap;

  auto stage = [](const char *name, auto &&fn) -> decltype(fn())
  {
    try
    {
      return fn();
    }
    catch (const ConfigError &e)
    {
      throw ConfigError(fmt::format("{}: {}", name, e.what()));
    }
    catch (const std::exception &e)
    {
      throw NumericalError(fmt::format("{}: {}", name, e.what()));
    }
  };

  result.coarse_solutions =
      stage("coarse_sweep", [&] { return coarse_sweep(oracle, omega, options.jobs); });
  std::vector<Index> chosen =
      stage("get_skeletons", [&] { return get_skeletons(result.coarse_solutions, eps); });
  if (options.max_skeletons > 0 && static_cast<Index>(chosen.size()) > options.max_skeletons)
  {
    chosen.resize(static_cast<std::size_t>(options.max_skeletons));
  }
  t.coarse_sweep = lap.lap();

  result.skeletons = stage("solve_fine_skeletons", [&]
                           { return solve_fine_skeletons(oracle, omega, chosen, options.jobs); });
  t.fine_solves = lap.lap();

  const Index n = oracle.fine_dimension();
  if (options.plan)
  {
    result.plan = *options.plan;
  }
  else
  {
    const Index cols = options.op_columns > 0
                           ? options.op_columns
                           : OperatorSamplePlan::default_column_count(n, std::ssize(chosen));
    result.plan = OperatorSamplePlan::random_columns(n, cols, options.seed);
  }
  result.operator_samples = stage("sample_operators", [&]
                                  { return sample_operators(oracle, omega, result.plan, options.jobs); });
  t.operator_samples = lap.lap();

  if (options.enrich)
  {
    result.skeletons = stage("additional_skeletons",
                             [&]
                             {
                               return additional_skeletons(
                                   result.operator_samples, std::move(result.skeletons),
                                   options.thresholds, oracle, omega, options.append_solutions,
                                   options.jobs);
                             });
  }
  t.enrichment = lap.lap();

  TruncatedBasis basis =
      stage("build_reduced_basis", [&] { return build_reduced_basis(result.skeletons, eps); });
  t.basis = lap.lap();

  const std::vector<Index> op_cols = result.skeletons.operator_indices();
  ReducedModel &model = result.model;
  model.mixing = stage("build_mixing_matrix", [&]
                       { return build_mixing_matrix(result.operator_samples, op_cols, &result.warnings); });
  t.mixing = lap.lap();

  model.projected_operators =
      stage("project_skeleton_operators",
            [&] { return project_skeleton_operators(result.skeletons, basis.basis, options.jobs); });
  if (oracle.has_offset())
  {
    model.projected_offset = oracle.offset_project(basis.basis);
  }
  model.rhs_mode = oracle.rhs_mode();
  if (model.rhs_mode == RhsMode::Interpolated)
  {
    model.projected_rhs = basis.basis.transpose() * result.skeletons.rhs;
  }
  t.projection = lap.lap();

  model.problem = oracle.name();
  model.thresholds = options.thresholds;
  model.fine_dimension = n;
  model.sample_count = omega.size();
  model.skeletons = result.skeletons.indices;
  model.additional = result.skeletons.additional;
  model.basis = std::move(basis.basis);
  model.singular_values = std::move(basis.singular_values);
  t.total = total.seconds();
  return result;
}

}  // namespace proxyrb
