// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_LAPLACE_BIE_HPP
#define PROXYRB_LAPLACE_BIE_HPP

#include <array>
#include <memory>
#include <vector>

#include "proxyrb/problem.hpp"

namespace proxyrb::bie
{

// Real trigonometric interpolant through equispaced samples v_k at theta_k = 2 pi k / N.
// For even N the Nyquist mode is carried as a pure cosine.
class TrigInterpolant
{
public:
  explicit TrigInterpolant(std::span<const double> values);

  std::size_t size() const { return n_; }
  // d-th derivative (d = 0, 1, 2) at theta.
  double operator()(double theta, int d = 0) const;

private:
  std::size_t n_;
  double mean_ = 0.0;
  std::vector<double> cos_;  // mode k at index k - 1
  std::vector<double> sin_;
  double nyquist_ = 0.0;
};

// Resamples a periodic grid function onto `target` equispaced points by trigonometric
// interpolation.
Vector trig_resample(const Vector &values, Index target);

// Star-shaped domain with boundary r(theta) (cos theta, sin theta).
class PolarDomain
{
public:
  // Throws ConfigError when r(theta) <= 0 anywhere on a fine check grid.
  explicit PolarDomain(std::vector<double> radial_nodes);

  const std::vector<double> &radial_nodes() const { return nodes_; }
  const TrigInterpolant &radius() const { return radius_; }

private:
  std::vector<double> nodes_;
  TrigInterpolant radius_;
};

double radial_interp(const PolarDomain &domain, double theta);

struct BieConfig
{
  double kappa = 0.4;
  std::array<double, 2> x0{0.6, 0.0};
  int radial_nodes = 8;
  Index n_fine = 512;
  Index n_coarse = 64;
  Index samples = 1024;
  RhsMode rhs_mode = RhsMode::Direct;

  void validate() const;
};

// Periodic trapezoid nodes theta_i = 2 pi i / n on the boundary.
struct BoundaryDiscretization
{
  std::vector<double> theta;
  std::vector<double> x, y;    // gamma(theta_i)
  std::vector<double> tx, ty;  // gamma'(theta_i)
  std::vector<double> nx, ny;  // outward unit normal
  std::vector<double> speed;   // |gamma'(theta_i)|
  std::vector<double> curvature;
  std::vector<double> weight;  // (2 pi / n) |gamma'(theta_i)|

  BoundaryDiscretization(const PolarDomain &domain, Index n);
  Index size() const { return static_cast<Index>(x.size()); }
};

// B = -G of the second-kind operator L = I / 2 + B, where G is the Nystrom double-layer
// matrix with the curvature limit -curvature / (4 pi) * w_i on its diagonal.
class BieOperator final : public OperatorHandle
{
public:
  explicit BieOperator(std::shared_ptr<const BoundaryDiscretization> disc);

  void assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const override;
  Vector column(Index j) const override;

  const BoundaryDiscretization &discretization() const { return *disc_; }

private:
  std::shared_ptr<const BoundaryDiscretization> disc_;
};

std::shared_ptr<const BieOperator> assemble_bie_operator(const PolarDomain &domain, Index n);

// Dense L = I / 2 - G.
Matrix bie_dense_operator(const PolarDomain &domain, Index n);

// f(x_i) = 1 / |x_i - x0|.
Vector bie_source(const BoundaryDiscretization &disc, const std::array<double, 2> &x0);

// p domains with N radial values drawn i.i.d. from U[1 - kappa, 1 + kappa].
SampleSpace sample_parameters(const BieConfig &config, std::uint64_t seed);

class LaplaceBieOracle final : public ProblemOracle
{
public:
  explicit LaplaceBieOracle(BieConfig config);

  std::string name() const override { return "laplace_bie"; }
  Index fine_dimension() const override { return config_.n_fine; }
  Index coarse_dimension() const override { return config_.n_coarse; }

  Vector coarse_solve(const ParameterSample &w) const override;
  std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const override;
  Vector rhs(const ParameterSample &w) const override;

  bool has_offset() const override { return true; }
  RhsMode rhs_mode() const override { return config_.rhs_mode; }
  Vector offset_apply(const Vector &v) const override { return 0.5 * v; }
  Matrix offset_project(const Matrix &q) const override;
  void add_offset(Eigen::Ref<Matrix> dense) const override;

  const BieConfig &config() const { return config_; }
  // Dense solve of L u = f at an arbitrary resolution.
  Vector solve_at(const ParameterSample &w, Index n) const;
  // Coarse solution trigonometrically interpolated onto the fine nodes.
  Vector prolonged_coarse_solution(const ParameterSample &w) const;

private:
  BieConfig config_;
};

}  // namespace proxyrb::bie

#endif  // PROXYRB_LAPLACE_BIE_HPP
