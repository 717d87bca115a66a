// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_OFFLINE_HPP
#define PROXYRB_OFFLINE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxyrb/numerics.hpp"
#include "proxyrb/problem.hpp"

namespace proxyrb
{

struct Thresholds
{
  // Skeleton selection, SVD cropping and (times eta) enrichment all use this one value.
  double epsilon = 1e-3;
  double eta = 1.5;

  void validate() const;
};

// Skeleton parameters and everything computed for them at fine resolution.
struct SkeletonSet
{
  std::vector<Index> indices;     // from the coarse CPQR
  std::vector<Index> additional;  // appended by enrichment, disjoint from `indices`
  // Fine solutions, one column per entry of `indices` followed by `additional` when
  // solutions are appended.
  Matrix solutions;
  // Fine right-hand sides and operator handles for indices ++ additional.
  Matrix rhs;
  std::vector<std::shared_ptr<const OperatorHandle>> operators;

  std::vector<Index> operator_indices() const;
  Index operator_count() const { return static_cast<Index>(operators.size()); }
};

struct OfflineTimings
{
  double coarse_sweep = 0.0;
  double fine_solves = 0.0;
  double operator_samples = 0.0;
  double enrichment = 0.0;
  double basis = 0.0;
  double mixing = 0.0;
  double projection = 0.0;
  double total = 0.0;
};

// Output of the offline stage; immutable afterwards and shareable across online solves.
struct ReducedModel
{
  std::string problem;
  Thresholds thresholds;
  RhsMode rhs_mode = RhsMode::Direct;
  Index fine_dimension = 0;
  Index sample_count = 0;
  std::vector<Index> skeletons;
  std::vector<Index> additional;
  Matrix basis;                         // n x n_rb
  Vector singular_values;               // retained sigma_k
  Matrix mixing;                        // s x p, s = |skeletons| + |additional|
  Matrix projected_operators;           // n_rb^2 x s, column j = vec(Q^T B_j Q)
  std::optional<Matrix> projected_offset;  // Q^T A Q
  std::optional<Matrix> projected_rhs;     // n_rb x s, column j = Q^T f(w_j)
  OfflineTimings timings;

  Index reduced_dimension() const { return basis.cols(); }
  Index skeleton_count() const { return static_cast<Index>(skeletons.size() + additional.size()); }
};

struct OfflineOptions
{
  Thresholds thresholds;
  bool enrich = true;
  bool append_solutions = true;
  // Full operator columns to sample; 0 picks OperatorSamplePlan::default_column_count.
  Index op_columns = 0;
  std::optional<OperatorSamplePlan> plan;
  std::uint64_t seed = 0;
  int jobs = 1;
  // Keep only the first max_skeletons coarse pivots (0 = no cap).
  Index max_skeletons = 0;
};

struct OfflineResult
{
  ReducedModel model;
  SkeletonSet skeletons;
  Matrix coarse_solutions;
  OperatorSamplePlan plan;
  Matrix operator_samples;
  std::vector<std::string> warnings;
};

// Indices of the coarse-sweep columns whose CPQR pivot is >= eps * r_11, in pivot order.
std::vector<Index> get_skeletons(const Matrix &coarse_solutions, double eps);

SkeletonSet solve_fine_skeletons(const ProblemOracle &oracle, const SampleSpace &omega,
                                 std::span<const Index> skeletons, int jobs = 1);

// Residual-driven enrichment: projects the current skeleton columns out of the operator
// samples, runs CPQR on the residual and promotes every column with r_ii >= eta * eps * a,
// a = largest operator-sample column norm. Returns the enlarged set; the newly promoted
// indices are appended to `additional`.
SkeletonSet additional_skeletons(const Matrix &op_samples, SkeletonSet skeletons,
                                 const Thresholds &thresholds, const ProblemOracle &oracle,
                                 const SampleSpace &omega, bool append_solutions = true,
                                 int jobs = 1);

TruncatedBasis build_reduced_basis(const SkeletonSet &skeletons, double eps);

// Least-squares fit op_samples ~= op_samples(:, skeleton_cols) * M. Adds a warning when
// the regression is underdetermined.
Matrix build_mixing_matrix(const Matrix &op_samples, std::span<const Index> skeleton_cols,
                           std::vector<std::string> *warnings = nullptr);

// n_rb^2 x s; column j = vec(Q^T B_j Q) through OperatorHandle::project.
Matrix project_skeleton_operators(const SkeletonSet &skeletons, const Matrix &basis,
                                  int jobs = 1);

OfflineResult run_offline(const ProblemOracle &oracle, const SampleSpace &omega,
                          const OfflineOptions &options);

}  // namespace proxyrb

#endif  // PROXYRB_OFFLINE_HPP
