// SPDX-License-Identifier: Apache-2.0

// Small dense operator families for pipeline tests. L(w) = A0 + sum_k w_k A_k with no offset
// split; coarse solves use the leading block.

#ifndef PROXYRB_TEST_TOY_ORACLE_HPP
#define PROXYRB_TEST_TOY_ORACLE_HPP

#include <cmath>
#include <random>

#include "proxyrb/problem.hpp"

namespace toy
{

using namespace proxyrb;

class DenseHandle final : public OperatorHandle
{
public:
  explicit DenseHandle(Matrix m) : OperatorHandle(m.rows()), m_(std::move(m)) {}
  void assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const override
  {
    block = m_.middleRows(begin, end - begin);
  }

private:
  Matrix m_;
};

class Oracle final : public ProblemOracle
{
public:
  // Term k is weighted by w_k, or by cos((k + 1) * sum_j (j + 1) w_j + k) when nonlinear.
  Oracle(Matrix base, std::vector<Matrix> terms, Vector source, Index coarse, bool nonlinear = false)
      : base_(std::move(base)), terms_(std::move(terms)), source_(std::move(source)), coarse_(coarse),
        nonlinear_(nonlinear)
  {
  }

  std::string name() const override { return "toy"; }
  Index fine_dimension() const override { return base_.rows(); }
  Index coarse_dimension() const override { return coarse_; }

  Matrix dense(const ParameterSample &w) const
  {
    Matrix l = base_;
    double phase = 0.0;
    for (std::size_t j = 0; j < w.coefficients.size(); ++j)
    {
      phase += static_cast<double>(j + 1) * w.coefficients[j];
    }
    for (std::size_t k = 0; k < terms_.size(); ++k)
    {
      const double kk = static_cast<double>(k);
      l += (nonlinear_ ? std::cos((kk + 1.0) * phase + kk) : w.coefficients[k]) * terms_[k];
    }
    return l;
  }

  Vector coarse_solve(const ParameterSample &w) const override
  {
    return dense(w).topLeftCorner(coarse_, coarse_).lu().solve(source_.head(coarse_));
  }
  std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const override
  {
    return std::make_shared<DenseHandle>(dense(w));
  }
  Vector rhs(const ParameterSample &) const override { return source_; }

private:
  Matrix base_;
  std::vector<Matrix> terms_;
  Vector source_;
  Index coarse_;
  bool nonlinear_;
};

// Well-conditioned random family of dimension n with `terms` parameters.
inline Oracle random_family(Index n, int terms, std::uint64_t seed, Index coarse = 0,
                            bool nonlinear = false)
{
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rnd = [&](double scale)
  { return Matrix(Matrix::NullaryExpr(n, n, [&] { return scale * u(g); })); };
  Matrix base = Matrix::Identity(n, n) + rnd(0.3 / std::sqrt(static_cast<double>(n)));
  std::vector<Matrix> t;
  for (int k = 0; k < terms; ++k)
  {
    t.push_back(rnd(0.2 / std::sqrt(static_cast<double>(n))));
  }
  Vector f = Vector::NullaryExpr(n, [&] { return u(g); });
  return Oracle(std::move(base), std::move(t), std::move(f), coarse > 0 ? coarse : n, nonlinear);
}

inline SampleSpace random_samples(Index p, int width, std::uint64_t seed)
{
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> c(static_cast<std::size_t>(p), std::vector<double>(width));
  for (auto &row : c)
  {
    for (auto &x : row)
    {
      x = u(g);
    }
  }
  return SampleSpace(std::move(c));
}

}  // namespace toy

#endif  // PROXYRB_TEST_TOY_ORACLE_HPP
