// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_NUMERICS_HPP
#define PROXYRB_NUMERICS_HPP

#include <vector>

#include <Eigen/Dense>

#include "proxyrb/error.hpp"

namespace proxyrb
{

// All dense storage in the library is column-major Eigen.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Result of a threshold-stopped column-pivoted QR.
//
// `permutation` is a bijection on the column indices. The first `kept` entries are the
// pivots whose magnitude passed the threshold; the remainder are ordered by their residual
// norm at the time the factorization halted (ties to the lowest index). `diagonals` holds
// |r_ii| for every pivot step actually performed, including the one that triggered the
// stop, so diagonals.size() is kept or kept + 1.
struct CpqrSelection
{
  std::vector<Index> permutation;
  Index kept = 0;
  std::vector<double> diagonals;
};

// Thin factors of the kept part of a CPQR: m(:, permutation[0..kept)) == q * r(:, 0..kept)
// and m(:, permutation) ≈ q * r for the factorized prefix.
struct CpqrFactors
{
  CpqrSelection selection;
  Matrix q;  // rows x kept, orthonormal columns
  Matrix r;  // kept x cols, upper trapezoidal in permuted column order
};

struct TruncatedBasis
{
  Matrix basis;
  Vector singular_values;

  Index rank() const { return basis.cols(); }
};

// Column-pivoted Householder QR that keeps every pivot with |r_ii| >= eps * |r_11| and halts
// at the first pivot below that. Throws NumericalError("degenerate input") for a zero matrix.
CpqrSelection cpqr_select(const Matrix &m, double eps);

// Same factorization with an absolute stopping threshold: pivots with |r_ii| >= threshold are
// kept. A zero matrix is not an error here; it simply keeps nothing.
CpqrSelection cpqr_select_absolute(const Matrix &m, double threshold);

CpqrFactors cpqr_factor(const Matrix &m, double eps);

// Left singular vectors with sigma_k >= eps * sigma_1.
TruncatedBasis truncated_svd(const Matrix &m, double eps);

// Column-wise minimum-norm least squares. Singular values below 1e-12 * sigma_1 are treated
// as zero.
Matrix least_squares(const Matrix &a, const Matrix &b);

// samples - P samples, where P projects onto range(skeleton_cols). The skeleton columns are
// orthonormalized by modified Gram-Schmidt; the projection is applied blockwise twice.
Matrix project_out(const Matrix &samples, const Matrix &skeleton_cols);

// Orthonormal basis of range(cols) by MGS with reorthogonalization; columns whose remaining
// norm drops below 1e-12 of the largest input column norm are skipped.
Matrix orthonormal_range(const Matrix &cols);

}  // namespace proxyrb

#endif  // PROXYRB_NUMERICS_HPP
