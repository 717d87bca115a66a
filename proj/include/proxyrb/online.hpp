// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_ONLINE_HPP
#define PROXYRB_ONLINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "proxyrb/offline.hpp"

namespace proxyrb
{

struct ReducedSolveResult
{
  Index sample_index = 0;
  Vector coefficients;     // v, length n_rb
  Vector lifted_solution;  // Q v
};

// Reduced operators whose LU reciprocal condition estimate falls below this are rejected.
inline constexpr double kMinReducedRcond = 1e-12;

// reshape(L_rb_hat * mixing_column) (+ Q^T A Q).
Matrix assemble_reduced_operator(const ReducedModel &model, const Vector &mixing_column);
Matrix assemble_reduced_operator(const ReducedModel &model, Index i);

Vector reduced_rhs_interpolated(const ReducedModel &model, Index i);

ReducedSolveResult reduced_solve(const ReducedModel &model, const ProblemOracle &oracle,
                                 const SampleSpace &omega, Index i);

struct ReferenceSolutions
{
  Matrix solutions;  // n x p
  double t_fine = 0.0;
};

ReferenceSolutions reference_solutions(const ProblemOracle &oracle, const SampleSpace &omega,
                                       int jobs = 1);

struct SampleFailure
{
  Index index = 0;
  std::string message;
};

struct ErrorReport
{
  // Per-sample relative L2 error (only with a reference); NaN marks a failed sample.
  std::vector<double> errors;
  std::vector<double> solve_seconds;
  std::vector<SampleFailure> failures;
  double mean_error = 0.0;
  double t_online = 0.0;
  std::optional<double> t_fine;

  bool has_errors() const { return !errors.empty(); }
};

double relative_l2_error(const Vector &reference, const Vector &approx);

// Solves all p reduced systems. Failed samples are recorded and excluded from the mean.
ErrorReport batch_evaluate(const ReducedModel &model, const ProblemOracle &oracle,
                           const SampleSpace &omega, const ReferenceSolutions *reference = nullptr,
                           int jobs = 1);

}  // namespace proxyrb

#endif  // PROXYRB_ONLINE_HPP
