// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/online.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "proxyrb/parallel.hpp"
#include "proxyrb/timer.hpp"

namespace proxyrb
{

namespace
{

void check_index(const ReducedModel &model, Index i)
{
  if (i < 0 || i >= model.mixing.cols())
  {
    throw ConfigError(
        fmt::format("sample index {} outside [0, {})", i, model.mixing.cols()));
  }
}

void check_compatible(const ReducedModel &model, const ProblemOracle &oracle,
                      const SampleSpace &omega)
{
  if (model.problem != oracle.name())
  {
    throw ConfigError(fmt::format("model was built for problem '{}', not '{}'", model.problem,
                                  oracle.name()));
  }
  if (model.fine_dimension != oracle.fine_dimension())
  {
    throw ConfigError(fmt::format("model fine dimension {} does not match problem dimension {}",
                                  model.fine_dimension, oracle.fine_dimension()));
  }
  if (model.sample_count != omega.size())
  {
    throw ConfigError(fmt::format("model was built for {} samples, sample space has {}",
                                  model.sample_count, omega.size()));
  }
}

}  // namespace

Matrix assemble_reduced_operator(const ReducedModel &model, const Vector &mixing_column)
{
  const Index nrb = model.reduced_dimension();
  if (mixing_column.size() != model.projected_operators.cols())
  {
    throw ConfigError(fmt::format("mixing column has {} entries, model has {} skeleton operators",
                                  mixing_column.size(), model.projected_operators.cols()));
  }
  Vector flat = model.projected_operators * mixing_column;
  Matrix out = flat.reshaped(nrb, nrb);
  if (model.projected_offset)
  {
    out += *model.projected_offset;
  }
  return out;
}

Matrix assemble_reduced_operator(const ReducedModel &model, Index i)
{
  check_index(model, i);
  return assemble_reduced_operator(model, Vector(model.mixing.col(i)));
}

Vector reduced_rhs_interpolated(const ReducedModel &model, Index i)
{
  check_index(model, i);
  if (!model.projected_rhs)
  {
    throw ConfigError("model has no projected skeleton right-hand sides");
  }
  return *model.projected_rhs * model.mixing.col(i);
}

ReducedSolveResult reduced_solve(const ReducedModel &model, const ProblemOracle &oracle,
                                 const SampleSpace &omega, Index i)
{
  check_index(model, i);
  const Matrix op = assemble_reduced_operator(model, i);
  const Vector rhs = model.rhs_mode == RhsMode::Interpolated
                         ? reduced_rhs_interpolated(model, i)
                         : oracle.rhs_reduced(model.basis, omega[i]);
  Eigen::PartialPivLU<Matrix> lu(op);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinReducedRcond))
  {
    throw NumericalError(
        fmt::format("reduced system ill-conditioned (sample {}, rcond {:.3e})", i, rcond));
  }
  ReducedSolveResult out;
  out.sample_index = i;
  out.coefficients = lu.solve(rhs);
  out.lifted_solution = model.basis * out.coefficients;
  if (!out.lifted_solution.allFinite())
  {
    throw NumericalError(fmt::format("reduced solve for sample {} produced non-finite values", i));
  }
  return out;
}

ReferenceSolutions reference_solutions(const ProblemOracle &oracle, const SampleSpace &omega,
                                       int jobs)
{
  ReferenceSolutions ref;
  ref.solutions.resize(oracle.fine_dimension(), omega.size());
  Stopwatch clock;
  parallel_for(omega.size(), jobs,
               [&](std::int64_t i)
               {
                 try
                 {
                   ref.solutions.col(i) = oracle.fine_solve(omega[i]).solution;
                 }
                 catch (const std::exception &e)
                 {
                   throw NumericalError(
                       fmt::format("fine solve failed for sample {}: {}", i, e.what()));
                 }
               });
  ref.t_fine = clock.seconds();
  return ref;
}

double relative_l2_error(const Vector &reference, const Vector &approx)
{
  const double denom = reference.norm();
  const double diff = (reference - approx).norm();
  return denom > 0.0 ? diff / denom : diff;
}

ErrorReport batch_evaluate(const ReducedModel &model, const ProblemOracle &oracle,
                           const SampleSpace &omega, const ReferenceSolutions *reference, int jobs)
{
  check_compatible(model, oracle, omega);
  const auto p = static_cast<std::size_t>(omega.size());
  if (reference != nullptr && reference->solutions.cols() != omega.size())
  {
    throw ConfigError("reference solutions do not cover the sample space");
  }

  ErrorReport report;
  report.solve_seconds.assign(p, 0.0);
  std::vector<Vector> solutions(p);
  std::vector<std::string> messages(p);

  Stopwatch clock;
  parallel_for(omega.size(), jobs,
               [&](std::int64_t i)
               {
                 const auto k = static_cast<std::size_t>(i);
                 Stopwatch one;
                 try
                 {
                   solutions[k] = reduced_solve(model, oracle, omega, i).lifted_solution;
                 }
                 catch (const std::exception &e)
                 {
                   messages[k] = e.what();
                 }
                 report.solve_seconds[k] = one.seconds();
               });
  report.t_online = clock.seconds();

  for (std::size_t k = 0; k < p; ++k)
  {
    if (!messages[k].empty())
    {
      report.failures.push_back({static_cast<Index>(k), messages[k]});
    }
  }

  if (reference != nullptr)
  {
    report.t_fine = reference->t_fine;
    report.errors.assign(p, std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < p; ++k)
    {
      if (messages[k].empty())
      {
        report.errors[k] =
            relative_l2_error(reference->solutions.col(static_cast<Index>(k)), solutions[k]);
        sum += report.errors[k];
        ++ok;
      }
    }
    report.mean_error = ok > 0 ? sum / static_cast<double>(ok)
                               : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace proxyrb
