// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_SYNTHETIC_AFFINE_HPP
#define PROXYRB_SYNTHETIC_AFFINE_HPP

#include <vector>

#include "proxyrb/problem.hpp"

namespace proxyrb::synthetic
{

// L(w) = A + sum_j T_j(2 w - 1) B_j, f(w) = (1 + w) f0, for a scalar w in [0, 1].
struct AffineFamily
{
  Index n = 0;
  Matrix offset;
  std::vector<Matrix> terms;
  Vector source;

  Index rank() const { return static_cast<Index>(terms.size()); }
  Matrix varying(double w) const;
  Matrix full(double w) const { return offset + varying(w); }
  // Same family on the leading k x k principal submatrices.
  AffineFamily leading(Index k) const;
};

// Chebyshev polynomial T_j(x).
double chebyshev(int j, double x);

// Draws A = I + 0.5 R / sqrt(n), B_j = 0.3 R_j / sqrt(n) (R uniform in [-1, 1]) until both the
// family and its leading n/2 block have condition number below 1e6 on 101 equispaced w.
// Throws NumericalError after 100 rejected draws.
AffineFamily make_affine_family(Index n, Index r, std::uint64_t seed);

// p values of w drawn uniformly from [0, 1].
SampleSpace affine_samples(Index p, std::uint64_t seed);

class SyntheticOperator final : public OperatorHandle
{
public:
  explicit SyntheticOperator(Matrix varying) : OperatorHandle(varying.rows()), b_(std::move(varying)) {}

  void assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const override
  {
    block = b_.middleRows(begin, end - begin);
  }
  Vector column(Index j) const override { return b_.col(j); }

private:
  Matrix b_;
};

class SyntheticAffineOracle final : public ProblemOracle
{
public:
  explicit SyntheticAffineOracle(AffineFamily family, RhsMode mode = RhsMode::Direct);

  std::string name() const override { return "synthetic_affine"; }
  Index fine_dimension() const override { return fine_.n; }
  Index coarse_dimension() const override { return coarse_.n; }

  Vector coarse_solve(const ParameterSample &w) const override;
  std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const override;
  Vector rhs(const ParameterSample &w) const override;

  bool has_offset() const override { return true; }
  RhsMode rhs_mode() const override { return mode_; }
  Vector offset_apply(const Vector &v) const override { return fine_.offset * v; }
  Matrix offset_project(const Matrix &q) const override { return q.transpose() * fine_.offset * q; }
  void add_offset(Eigen::Ref<Matrix> dense) const override { dense += fine_.offset; }

  const AffineFamily &family() const { return fine_; }

private:
  AffineFamily fine_;
  AffineFamily coarse_;
  RhsMode mode_;
};

}  // namespace proxyrb::synthetic

#endif  // PROXYRB_SYNTHETIC_AFFINE_HPP
