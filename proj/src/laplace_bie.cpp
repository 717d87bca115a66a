// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/laplace_bie.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "proxyrb/parallel.hpp"
#include "proxyrb/simd/kernels.hpp"

namespace proxyrb::bie
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PolarDomain domain_of(const ParameterSample &w) { return PolarDomain(w.coefficients); }

}  // namespace

TrigInterpolant::TrigInterpolant(std::span<const double> values) : n_(values.size())
{
  if (n_ == 0)
  {
    throw ConfigError("trigonometric interpolant needs at least one sample");
  }
  const double n = static_cast<double>(n_);
  for (double v : values)
  {
    mean_ += v;
  }
  mean_ /= n;
  const std::size_t modes = (n_ - 1) / 2;
  cos_.assign(modes, 0.0);
  sin_.assign(modes, 0.0);
  for (std::size_t k = 1; k <= modes; ++k)
  {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
    {
      const double t = kTwoPi * static_cast<double>(k * j % n_) / n;
      a += values[j] * std::cos(t);
      b += values[j] * std::sin(t);
    }
    cos_[k - 1] = 2.0 * a / n;
    sin_[k - 1] = 2.0 * b / n;
  }
  if (n_ % 2 == 0)
  {
    for (std::size_t j = 0; j < n_; ++j)
    {
      nyquist_ += (j % 2 == 0 ? values[j] : -values[j]);
    }
    nyquist_ /= n;
  }
}

double TrigInterpolant::operator()(double theta, int d) const
{
  double out = d == 0 ? mean_ : 0.0;
  auto add = [&](double k, double a, double b)
  {
    const double c = std::cos(k * theta), s = std::sin(k * theta);
    switch (d)
    {
    case 0:
      out += a * c + b * s;
      break;
    case 1:
      out += k * (b * c - a * s);
      break;
    default:
      out -= k * k * (a * c + b * s);
      break;
    }
  };
  for (std::size_t k = 1; k <= cos_.size(); ++k)
  {
    add(static_cast<double>(k), cos_[k - 1], sin_[k - 1]);
  }
  if (n_ % 2 == 0 && n_ > 1)
  {
    add(static_cast<double>(n_ / 2), nyquist_, 0.0);
  }
  return out;
}

Vector trig_resample(const Vector &values, Index target)
{
  const TrigInterpolant f(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
  Vector out(target);
  for (Index i = 0; i < target; ++i)
  {
    out(i) = f(kTwoPi * static_cast<double>(i) / static_cast<double>(target));
  }
  return out;
}

PolarDomain::PolarDomain(std::vector<double> radial_nodes)
    : nodes_(std::move(radial_nodes)), radius_(nodes_)
{
  const std::size_t checks = std::max<std::size_t>(1024, 64 * nodes_.size());
  for (std::size_t i = 0; i < checks; ++i)
  {
    const double r = radius_(kTwoPi * static_cast<double>(i) / static_cast<double>(checks));
    if (!(r > 0.0))
    {
      throw ConfigError("self-intersecting or degenerate domain");
    }
  }
}

double radial_interp(const PolarDomain &domain, double theta) { return domain.radius()(theta); }

void BieConfig::validate() const
{
  if (!(kappa >= 0.0 && kappa < 1.0))
  {
    throw ConfigError(fmt::format("bie.kappa {} outside [0, 1)", kappa));
  }
  if (radial_nodes < 1)
  {
    throw ConfigError("bie.radial_nodes must be >= 1");
  }
  if (n_coarse < 16 || n_fine <= n_coarse)
  {
    throw ConfigError(fmt::format("bie needs 16 <= n_coarse < n_fine (got {} and {})", n_coarse,
                                  n_fine));
  }
  if (samples < 1)
  {
    throw ConfigError("bie.samples must be >= 1");
  }
}

BoundaryDiscretization::BoundaryDiscretization(const PolarDomain &domain, Index n)
{
  if (n < 3)
  {
    throw ConfigError(fmt::format("boundary discretization needs n >= 3, got {}", n));
  }
  const auto m = static_cast<std::size_t>(n);
  for (auto *v : {&theta, &x, &y, &tx, &ty, &nx, &ny, &speed, &curvature, &weight})
  {
    v->resize(m);
  }
  const auto &r = domain.radius();
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i)
  {
    const double t = h * static_cast<double>(i);
    const double c = std::cos(t), s = std::sin(t);
    const double r0 = r(t, 0), r1 = r(t, 1), r2 = r(t, 2);
    const double dx = r1 * c - r0 * s;
    const double dy = r1 * s + r0 * c;
    const double ddx = r2 * c - 2.0 * r1 * s - r0 * c;
    const double ddy = r2 * s + 2.0 * r1 * c - r0 * s;
    const double sp = std::hypot(dx, dy);
    theta[i] = t;
    x[i] = r0 * c;
    y[i] = r0 * s;
    tx[i] = dx;
    ty[i] = dy;
    nx[i] = dy / sp;
    ny[i] = -dx / sp;
    speed[i] = sp;
    curvature[i] = (dx * ddy - dy * ddx) / (sp * sp * sp);
    weight[i] = h * sp;
  }
}

BieOperator::BieOperator(std::shared_ptr<const BoundaryDiscretization> disc)
    : OperatorHandle(disc->size()), disc_(std::move(disc))
{
}

void BieOperator::assemble_rows(Index begin, Index end, Eigen::Ref<Matrix> block) const
{
  const auto &d = *disc_;
  const simd::BoundaryNodes nodes{d.x.data(),  d.y.data(),      d.nx.data(),
                                  d.ny.data(), d.weight.data(), d.x.size()};
  Vector row(dimension());
  for (Index i = begin; i < end; ++i)
  {
    const auto k = static_cast<std::size_t>(i);
    simd::double_layer_row(d.x[k], d.y[k], nodes, row.data());
    block.row(i - begin) = -row.transpose();
    block(i - begin, i) = d.curvature[k] * d.weight[k] / (2.0 * kTwoPi);
  }
}

Vector BieOperator::column(Index j) const
{
  const auto &d = *disc_;
  const auto k = static_cast<std::size_t>(j);
  Vector out(dimension());
  for (std::size_t i = 0; i < d.x.size(); ++i)
  {
    if (i == k)
    {
      out(j) = d.curvature[k] * d.weight[k] / (2.0 * kTwoPi);
      continue;
    }
    const double rx = d.x[i] - d.x[k];
    const double ry = d.y[i] - d.y[k];
    const double r2 = rx * rx + ry * ry;
    out(static_cast<Index>(i)) = -d.weight[k] / kTwoPi * (rx * d.nx[k] + ry * d.ny[k]) / r2;
  }
  return out;
}

std::shared_ptr<const BieOperator> assemble_bie_operator(const PolarDomain &domain, Index n)
{
  return std::make_shared<BieOperator>(std::make_shared<BoundaryDiscretization>(domain, n));
}

Matrix bie_dense_operator(const PolarDomain &domain, Index n)
{
  Matrix l = assemble_bie_operator(domain, n)->dense();
  l.diagonal().array() += 0.5;
  return l;
}

Vector bie_source(const BoundaryDiscretization &disc, const std::array<double, 2> &x0)
{
  Vector f(disc.size());
  for (Index i = 0; i < disc.size(); ++i)
  {
    const auto k = static_cast<std::size_t>(i);
    const double dist = std::hypot(disc.x[k] - x0[0], disc.y[k] - x0[1]);
    if (dist <= 1e-10)
    {
      throw ConfigError(fmt::format("boundary node {} coincides with the source point", i));
    }
    f(i) = 1.0 / dist;
  }
  return f;
}

SampleSpace sample_parameters(const BieConfig &config, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<std::vector<double>> coeffs(static_cast<std::size_t>(config.samples));
  for (auto &b : coeffs)
  {
    b.resize(static_cast<std::size_t>(config.radial_nodes));
    for (auto &v : b)
    {
      v = rng.uniform(1.0 - config.kappa, 1.0 + config.kappa);
    }
  }
  return SampleSpace(std::move(coeffs));
}

LaplaceBieOracle::LaplaceBieOracle(BieConfig config) : config_(std::move(config))
{
  config_.validate();
}

Vector LaplaceBieOracle::solve_at(const ParameterSample &w, Index n) const
{
  const PolarDomain domain = domain_of(w);
  const BoundaryDiscretization disc(domain, n);
  Matrix l = BieOperator(std::make_shared<BoundaryDiscretization>(disc)).dense();
  l.diagonal().array() += 0.5;
  Vector u = l.partialPivLu().solve(bie_source(disc, config_.x0));
  if (!u.allFinite())
  {
    throw NumericalError(fmt::format("boundary integral solve for sample {} failed", w.index));
  }
  return u;
}

Vector LaplaceBieOracle::coarse_solve(const ParameterSample &w) const
{
  return solve_at(w, config_.n_coarse);
}

std::shared_ptr<const OperatorHandle> LaplaceBieOracle::fine_operator(const ParameterSample &w) const
{
  return assemble_bie_operator(domain_of(w), config_.n_fine);
}

Vector LaplaceBieOracle::rhs(const ParameterSample &w) const
{
  return bie_source(BoundaryDiscretization(domain_of(w), config_.n_fine), config_.x0);
}

Matrix LaplaceBieOracle::offset_project(const Matrix &q) const
{
  return 0.5 * (q.transpose() * q);
}

void LaplaceBieOracle::add_offset(Eigen::Ref<Matrix> dense) const
{
  dense.diagonal().array() += 0.5;
}

Vector LaplaceBieOracle::prolonged_coarse_solution(const ParameterSample &w) const
{
  return trig_resample(coarse_solve(w), config_.n_fine);
}

}  // namespace proxyrb::bie
