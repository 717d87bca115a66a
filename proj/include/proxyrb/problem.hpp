// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_PROBLEM_HPP
#define PROXYRB_PROBLEM_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "proxyrb/numerics.hpp"

namespace proxyrb
{

// One point of the discrete sample space. `index` is its position in the SampleSpace and the
// column it owns in every sweep matrix.
struct ParameterSample
{
  Index index = 0;
  std::vector<double> coefficients;
};

class SampleSpace
{
public:
  SampleSpace() = default;
  // Indices are assigned from position. All coefficient vectors must have the same length.
  explicit SampleSpace(std::vector<std::vector<double>> coefficients);

  Index size() const { return static_cast<Index>(samples_.size()); }
  bool empty() const { return samples_.empty(); }
  const ParameterSample &operator[](Index i) const { return samples_[static_cast<std::size_t>(i)]; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

private:
  std::vector<ParameterSample> samples_;
};

// Deferred access to the parameter-dependent part of a dense fine operator. For plain
// problems that is L(w); for offset problems L(w) = A + B(w) and the handle exposes B(w),
// with A supplied by the oracle. Nothing n x n is stored unless a caller asks for dense().
class OperatorHandle
{
public:
  explicit OperatorHandle(Index dimension) : n_(dimension) {}
  virtual ~OperatorHandle() = default;

  Index dimension() const { return n_; }

  // Rows [begin, end) into block ((end - begin) x n).
  virtual void assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const = 0;
  virtual Vector column(Index j) const;
  virtual Vector apply(const Vector &v) const;
  // q^T B q, accumulated over row blocks.
  virtual Matrix project(const Matrix &q) const;

  Matrix dense() const;
  double entry(Index i, Index j) const { return column(j)(i); }
  // Entries of vec(B) (column-major) at the requested positions.
  Vector sample(std::span<const Index> vec_indices) const;

protected:
  static constexpr Index kRowBlock = 64;

private:
  Index n_;
};

enum class RhsMode
{
  // The oracle forms f(w) and the online stage applies Q^T.
  Direct,
  // Q^T f is interpolated from the projected skeleton right-hand sides with the mixing matrix.
  Interpolated
};

struct FineSolution
{
  Vector solution;
  Vector rhs;
  std::shared_ptr<const OperatorHandle> op;
};

// The pipeline's view of a parameterized integral equation L(w) u = f(w).
class ProblemOracle
{
public:
  virtual ~ProblemOracle() = default;

  virtual std::string name() const = 0;
  virtual Index fine_dimension() const = 0;
  virtual Index coarse_dimension() const = 0;

  virtual Vector coarse_solve(const ParameterSample &w) const = 0;
  virtual std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const = 0;
  virtual Vector rhs(const ParameterSample &w) const = 0;

  // Dense LU with partial pivoting on the assembled fine operator.
  virtual FineSolution fine_solve(const ParameterSample &w) const;

  virtual bool has_offset() const { return false; }
  virtual Vector offset_apply(const Vector &v) const;
  virtual Matrix offset_project(const Matrix &q) const;
  virtual void add_offset(Eigen::Ref<Matrix> dense) const;

  virtual RhsMode rhs_mode() const { return RhsMode::Direct; }

  Vector rhs_reduced(const Matrix &q, const ParameterSample &w) const;
  // L(w) v including the offset.
  Vector apply_full(const OperatorHandle &op, const Vector &v) const;
  Matrix dense_full(const OperatorHandle &op) const;

protected:
  // Lets a driver derive f from the already assembled varying part inside fine_solve.
  virtual Vector rhs_from_dense(const ParameterSample &w, const Matrix &varying) const;
};

// The fixed set of vec(B) positions sampled for every parameter (rows of the operator-sample
// matrix). Stored as column-major vec indices of an n x n operator.
struct OperatorSamplePlan
{
  Index dimension = 0;
  std::vector<Index> vec_indices;

  Index size() const { return static_cast<Index>(vec_indices.size()); }

  static OperatorSamplePlan from_columns(Index n, std::span<const Index> columns);
  // `count` distinct columns drawn uniformly from the run seed, listed in increasing order.
  static OperatorSamplePlan random_columns(Index n, Index count, std::uint64_t seed);
  // ceil(max(4 s, 8) / n) full columns, at least one.
  static Index default_column_count(Index n, Index expected_skeletons);
};

// S_C: column i is the coarse solution for sample i.
Matrix coarse_sweep(const ProblemOracle &oracle, const SampleSpace &omega, int jobs = 1);

// L(O, :) (or B(O, :) for offset problems): |O| x p.
Matrix sample_operators(const ProblemOracle &oracle, const SampleSpace &omega,
                        const OperatorSamplePlan &plan, int jobs = 1);

}  // namespace proxyrb

#endif  // PROXYRB_PROBLEM_HPP
