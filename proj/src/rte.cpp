// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/rte.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace proxyrb::rte
{

namespace
{

constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;

}  // namespace

GaussLegendre::GaussLegendre(int order)
{
  if (order < 1)
  {
    throw ConfigError(fmt::format("Gauss-Legendre order {} must be positive", order));
  }
  if (order == 1)
  {
    nodes = {0.5};
    weights = {1.0};
    return;
  }
  const auto n = static_cast<std::size_t>(order);
  nodes.resize(n);
  weights.resize(n);
  // Newton on P_n from the Chebyshev-like initial guess; symmetric pairs filled together.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i)
  {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16)
      {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = 0.5 * (1.0 - z);
    nodes[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
}

RteMedium RteMedium::from_sample(const ParameterSample &w, double sign)
{
  if (w.coefficients.size() != 4)
  {
    throw ConfigError(fmt::format("rte sample {} needs 4 coefficients, has {}", w.index,
                                  w.coefficients.size()));
  }
  RteMedium m;
  m.amplitude = w.coefficients[0];
  m.c1 = w.coefficients[1];
  m.c2 = w.coefficients[2];
  m.width = w.coefficients[3];
  m.sign = sign;
  return m;
}

double RteMedium::mu_t(const Point &x) const
{
  const double e1 = x[0] - c1, e2 = x[1] - c2;
  return background + amplitude * std::exp(-(e1 * e1 + sign * e2 * e2) / (width * width));
}

simd::GaussianField RteMedium::field() const
{
  return {background, amplitude, c1, c2, 1.0 / (width * width), sign};
}

void RteConfig::validate() const
{
  if (n_coarse < 2 || n_fine <= n_coarse)
  {
    throw ConfigError(fmt::format("rte needs 2 <= n_coarse < n_fine (got {} and {})", n_coarse,
                                  n_fine));
  }
  if (line_order < 4)
  {
    throw ConfigError(fmt::format("rte.line_order {} must be >= 4", line_order));
  }
  if (amplitudes.empty() || widths.empty())
  {
    throw ConfigError("rte.amplitudes and rte.widths must be nonempty");
  }
  for (double a : amplitudes)
  {
    if (!(a >= 0.0))
    {
      throw ConfigError(fmt::format("rte amplitude {} must be >= 0", a));
    }
  }
  for (double t : widths)
  {
    if (!(t > 0.0))
    {
      throw ConfigError(fmt::format("rte width {} must be > 0", t));
    }
  }
  if (grid_n < 1)
  {
    throw ConfigError("rte.grid_n must be >= 1");
  }
  if (gaussian_sign != 1.0 && gaussian_sign != -1.0)
  {
    throw ConfigError("rte.gaussian_sign must be + or -");
  }
}

double rectangle_inverse_distance(double a, double b)
{
  const double d = std::hypot(a, b);
  return 4.0 * (a * std::log((b + d) / a) + b * std::log((a + d) / b));
}

double source_term(const Point &x)
{
  const double e1 = x[0] - 0.5, e2 = x[1] - 0.5;
  return std::exp(-256.0 * (e1 * e1 + e2 * e2));
}

RteDiscretization::RteDiscretization(Index n) : side(n)
{
  if (n < 1)
  {
    throw ConfigError("rte grid needs at least one point per side");
  }
  const GaussLegendre g(static_cast<int>(n));
  const auto m = static_cast<std::size_t>(n * n);
  x1.resize(m);
  x2.resize(m);
  weight.resize(m);
  self_cell.resize(m);
  source.resize(n * n);
  for (std::size_t iy = 0; iy < g.nodes.size(); ++iy)
  {
    for (std::size_t ix = 0; ix < g.nodes.size(); ++ix)
    {
      const std::size_t k = ix + g.nodes.size() * iy;
      x1[k] = g.nodes[ix];
      x2[k] = g.nodes[iy];
      weight[k] = g.weights[ix] * g.weights[iy];
      self_cell[k] = rectangle_inverse_distance(0.5 * g.weights[ix], 0.5 * g.weights[iy]);
      source(static_cast<Index>(k)) = source_term({x1[k], x2[k]});
    }
  }
}

double attenuation_kernel(const Point &x, const Point &y, const RteMedium &medium,
                          const GaussLegendre &rule)
{
  const double dx = x[0] - y[0], dy = x[1] - y[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0)
  {
    throw ConfigError("attenuation kernel is singular at x == y");
  }
  double integral = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
  {
    const double tau = rule.nodes[q];
    integral += rule.weights[q] * medium.mu_t({x[0] - tau * dx, x[1] - tau * dy});
  }
  return std::exp(-r * integral) * kInv2Pi / r;
}

RteOperator::RteOperator(RteMedium medium, std::shared_ptr<const RteDiscretization> disc,
                         std::shared_ptr<const GaussLegendre> rule)
    : OperatorHandle(disc->size()), medium_(medium), disc_(std::move(disc)), rule_(std::move(rule))
{
  mu_s_.resize(static_cast<std::size_t>(dimension()));
  for (Index k = 0; k < dimension(); ++k)
  {
    mu_s_[static_cast<std::size_t>(k)] = medium_.mu_s(disc_->point(k));
  }
}

void RteOperator::assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const
{
  const auto &d = *disc_;
  const auto n = static_cast<std::size_t>(dimension());
  const simd::GaussianField field = medium_.field();
  const simd::LineRule rule = rule_->view();
  Eigen::ArrayXd row(dimension());
  const Eigen::Map<const Eigen::ArrayXd> w(d.weight.data(), dimension());
  for (Index i = begin; i < end; ++i)
  {
    const auto k = static_cast<std::size_t>(i);
    simd::attenuation_row(d.x1[k], d.x2[k], d.x1.data(), d.x2.data(), n, field, rule, row.data());
    block.row(i - begin) = (-mu_s_[k] * row * w).matrix().transpose();
    block(i - begin, i) = -mu_s_[k] * kInv2Pi * d.self_cell[k];
  }
}

Vector RteOperator::column(Index j) const
{
  const auto &d = *disc_;
  const auto n = static_cast<std::size_t>(dimension());
  const auto k = static_cast<std::size_t>(j);
  Eigen::ArrayXd col(dimension());
  // K is symmetric in its two points, so column j reuses the row kernel anchored at x_j.
  simd::attenuation_row(d.x1[k], d.x2[k], d.x1.data(), d.x2.data(), n, medium_.field(),
                        rule_->view(), col.data());
  const Eigen::Map<const Eigen::ArrayXd> mu(mu_s_.data(), dimension());
  Vector out = (-d.weight[k] * mu * col).matrix();
  out(j) = -mu_s_[k] * kInv2Pi * d.self_cell[k];
  return out;
}

Vector rte_rhs(const RteOperator &op, const RteDiscretization &disc)
{
  return -op.apply(disc.source);
}

SampleSpace build_parameter_grid(const RteConfig &config)
{
  std::vector<std::vector<double>> coeffs;
  const double n = config.grid_n;
  for (double a : config.amplitudes)
  {
    for (double theta : config.widths)
    {
      for (int i = 0; i <= config.grid_n; ++i)
      {
        for (int j = 0; j <= config.grid_n; ++j)
        {
          coeffs.push_back({a, i / n, j / n, theta});
        }
      }
    }
  }
  return SampleSpace(std::move(coeffs));
}

RteOracle::RteOracle(RteConfig config) : config_(std::move(config))
{
  config_.validate();
  fine_ = std::make_shared<RteDiscretization>(config_.n_fine);
  coarse_ = std::make_shared<RteDiscretization>(config_.n_coarse);
  rule_ = std::make_shared<GaussLegendre>(config_.line_order);
}

RteMedium RteOracle::medium(const ParameterSample &w) const
{
  return RteMedium::from_sample(w, config_.gaussian_sign);
}

Vector RteOracle::coarse_solve(const ParameterSample &w) const
{
  const RteOperator op(medium(w), coarse_, rule_);
  Matrix l = op.dense();
  const Vector f = -(l * coarse_->source);
  l.diagonal().array() += 1.0;
  return l.partialPivLu().solve(f);
}

std::shared_ptr<const OperatorHandle> RteOracle::fine_operator(const ParameterSample &w) const
{
  return std::make_shared<RteOperator>(medium(w), fine_, rule_);
}

Vector RteOracle::rhs(const ParameterSample &w) const
{
  return rte_rhs(RteOperator(medium(w), fine_, rule_), *fine_);
}

Vector RteOracle::rhs_from_dense(const ParameterSample &, const Matrix &varying) const
{
  return -(varying * fine_->source);
}

void RteOracle::add_offset(Eigen::Ref<Matrix> dense) const
{
  dense.diagonal().array() += 1.0;
}

}  // namespace proxyrb::rte
