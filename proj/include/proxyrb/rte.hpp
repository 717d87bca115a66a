// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_RTE_HPP
#define PROXYRB_RTE_HPP

#include <array>
#include <memory>
#include <vector>

#include "proxyrb/problem.hpp"
#include "proxyrb/simd/kernels.hpp"

namespace proxyrb::rte
{

using Point = std::array<double, 2>;

// Gauss-Legendre nodes and weights mapped to [0, 1].
struct GaussLegendre
{
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order);
  simd::LineRule view() const { return {nodes.data(), weights.data(), nodes.size()}; }
};

// mu_t(x) = background + amplitude * exp(-((x1 - c1)^2 + sign * (x2 - c2)^2) / width^2),
// mu_s = scattering_scale * mu_t.
struct RteMedium
{
  double amplitude = 0.0;
  double c1 = 0.5;
  double c2 = 0.5;
  double width = 0.2;
  double background = 1.0;
  double scattering_scale = 1.0;
  double sign = 1.0;

  static RteMedium from_sample(const ParameterSample &w, double sign);
  double mu_t(const Point &x) const;
  double mu_s(const Point &x) const { return scattering_scale * mu_t(x); }
  simd::GaussianField field() const;
};

struct RteConfig
{
  Index n_fine = 32;   // points per side
  Index n_coarse = 16;
  int line_order = 16;
  std::vector<double> amplitudes{2.0, 6.0, 10.0};
  std::vector<double> widths{0.2, 0.4, 0.6};
  int grid_n = 6;
  double gaussian_sign = 1.0;
  RhsMode rhs_mode = RhsMode::Interpolated;

  void validate() const;
};

// Tensor Gauss-Legendre collocation grid on [0, 1]^2. Point k = ix + side * iy.
struct RteDiscretization
{
  Index side = 0;
  std::vector<double> x1, x2;
  std::vector<double> weight;
  // Integral of 1 / |x - x_k| over the rectangular cell of x_k.
  std::vector<double> self_cell;
  Vector source;  // g at the collocation points

  explicit RteDiscretization(Index side);
  Index size() const { return side * side; }
  Point point(Index k) const { return {x1[static_cast<std::size_t>(k)], x2[static_cast<std::size_t>(k)]}; }
};

// Integral of 1/r over [-a, a] x [-b, b].
double rectangle_inverse_distance(double a, double b);

double source_term(const Point &x);

// K(x, y) = exp(-|x - y| * int_0^1 mu_t(x - tau (x - y)) dtau) / (2 pi |x - y|).
// Throws ConfigError for x == y.
double attenuation_kernel(const Point &x, const Point &y, const RteMedium &medium,
                          const GaussLegendre &rule);

// Varying part B of L = I + B: B_ij = -mu_s(x_i) K(x_i, x_j) w_j off the diagonal and
// -mu_s(x_i) / (2 pi) * self_cell_i on it.
class RteOperator final : public OperatorHandle
{
public:
  RteOperator(RteMedium medium, std::shared_ptr<const RteDiscretization> disc,
              std::shared_ptr<const GaussLegendre> rule);

  void assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const override;
  Vector column(Index j) const override;

  const RteMedium &medium() const { return medium_; }

private:
  RteMedium medium_;
  std::shared_ptr<const RteDiscretization> disc_;
  std::shared_ptr<const GaussLegendre> rule_;
  std::vector<double> mu_s_;
};

// f = -B g.
Vector rte_rhs(const RteOperator &op, const RteDiscretization &disc);

// A x Theta x {(i / N, j / N)}: coefficients [A, i / N, j / N, theta], j fastest.
SampleSpace build_parameter_grid(const RteConfig &config);

class RteOracle final : public ProblemOracle
{
public:
  explicit RteOracle(RteConfig config);

  std::string name() const override { return "rte"; }
  Index fine_dimension() const override { return fine_->size(); }
  Index coarse_dimension() const override { return coarse_->size(); }

  Vector coarse_solve(const ParameterSample &w) const override;
  std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const override;
  Vector rhs(const ParameterSample &w) const override;

  bool has_offset() const override { return true; }
  Vector offset_apply(const Vector &v) const override { return v; }
  Matrix offset_project(const Matrix &q) const override { return q.transpose() * q; }
  void add_offset(Eigen::Ref<Matrix> dense) const override;
  RhsMode rhs_mode() const override { return config_.rhs_mode; }

  const RteConfig &config() const { return config_; }
  const RteDiscretization &fine_discretization() const { return *fine_; }

protected:
  Vector rhs_from_dense(const ParameterSample &w, const Matrix &varying) const override;

private:
  RteMedium medium(const ParameterSample &w) const;

  RteConfig config_;
  std::shared_ptr<const RteDiscretization> fine_;
  std::shared_ptr<const RteDiscretization> coarse_;
  std::shared_ptr<const GaussLegendre> rule_;
};

}  // namespace proxyrb::rte

#endif  // PROXYRB_RTE_HPP
