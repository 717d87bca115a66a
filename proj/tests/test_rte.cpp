// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <set>

#include <doctest.h>

#include "oracles.hpp"
#include "physics_oracles.hpp"
#include "proxyrb/offline.hpp"
#include "proxyrb/online.hpp"
#include "proxyrb/rte.hpp"

using namespace proxyrb;
using namespace proxyrb::rte;
using std::numbers::pi;

namespace
{

double kernel_oracle(const Point &x, const Point &y, const RteMedium &m)
{
  const oracle::Medium mu{m.background, m.amplitude, m.c1, m.c2, m.width, m.sign};
  return oracle::attenuation({x[0], x[1]}, {y[0], y[1]}, mu);
}

RteMedium gaussian(double a, double c1, double c2, double width)
{
  RteMedium m;
  m.amplitude = a;
  m.c1 = c1;
  m.c2 = c2;
  m.width = width;
  return m;
}

RteConfig tiny()
{
  RteConfig c;
  c.n_fine = 8;
  c.n_coarse = 4;
  c.grid_n = 2;
  c.amplitudes = {2.0, 6.0};
  c.widths = {0.3};
  return c;
}

// Media that differ only by a scattering multiplier: B(w) = w * B_1, an exactly affine family
// exercised through the library's RTE operator.
class ScaledScattering final : public ProblemOracle
{
public:
  ScaledScattering() : disc_(std::make_shared<RteDiscretization>(8)), rule_(std::make_shared<GaussLegendre>(16)) {}

  std::string name() const override { return "scaled_rte"; }
  Index fine_dimension() const override { return disc_->size(); }
  Index coarse_dimension() const override { return disc_->size(); }
  Vector coarse_solve(const ParameterSample &w) const override { return fine_solve(w).solution; }
  std::shared_ptr<const OperatorHandle> fine_operator(const ParameterSample &w) const override
  {
    RteMedium m = gaussian(5.0, 0.4, 0.6, 0.3);
    m.scattering_scale = w.coefficients[0];
    return std::make_shared<RteOperator>(m, disc_, rule_);
  }
  Vector rhs(const ParameterSample &w) const override
  {
    return rte_rhs(static_cast<const RteOperator &>(*fine_operator(w)), *disc_);
  }
  bool has_offset() const override { return true; }
  Vector offset_apply(const Vector &v) const override { return v; }
  Matrix offset_project(const Matrix &q) const override { return q.transpose() * q; }
  void add_offset(Eigen::Ref<Matrix> dense) const override { dense.diagonal().array() += 1.0; }
  RhsMode rhs_mode() const override { return RhsMode::Interpolated; }

private:
  std::shared_ptr<const RteDiscretization> disc_;
  std::shared_ptr<const GaussLegendre> rule_;
};

}  // namespace

TEST_CASE("Gauss-Legendre rule on [0, 1]")
{
  for (int order : {1, 4, 16})
  {
    const GaussLegendre g(order);
    double sum = 0.0, moment = 0.0;
    for (int i = 0; i < order; ++i)
    {
      sum += g.weights[i];
      moment += g.weights[i] * std::pow(g.nodes[i], 2 * order - 1);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(moment == doctest::Approx(1.0 / (2 * order)).epsilon(1e-12));
  }
}

TEST_CASE("attenuation kernel closed forms")
{
  const GaussLegendre rule(16);
  RteMedium zero;
  zero.background = 0.0;
  RteMedium constant;
  constant.background = 2.5;
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k)
  {
    const Point x{u(g), u(g)}, y{u(g), u(g)};
    const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
    CHECK(attenuation_kernel(x, y, zero, rule) == doctest::Approx(1.0 / (2.0 * pi * r)).epsilon(1e-14));
    CHECK(attenuation_kernel(x, y, constant, rule) ==
          doctest::Approx(std::exp(-2.5 * r) / (2.0 * pi * r)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(attenuation_kernel({0.3, 0.3}, {0.3, 0.3}, constant, rule), ConfigError);
}

TEST_CASE("attenuation kernel against the brute-force line integral")
{
  const GaussLegendre rule(16);
  const RteMedium m = gaussian(4.0, 0.5, 0.5, 0.3);
  const Point x{0.2, 0.2}, y{0.8, 0.7};
  const double ref = kernel_oracle(x, y, m);
  CHECK(std::abs(attenuation_kernel(x, y, m, rule) - ref) <= 1e-8 * ref);

  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0), amp(2.0, 10.0), width(0.2, 0.6);
  for (int k = 0; k < 100; ++k)
  {
    const Point a{u(g), u(g)}, b{u(g), u(g)};
    const RteMedium med = gaussian(amp(g), u(g), u(g), width(g));
    const double want = kernel_oracle(a, b, med);
    CAPTURE(k);
    CHECK(std::abs(attenuation_kernel(a, b, med, rule) - want) <= 1e-8 * want);
  }
}

TEST_CASE("attenuation kernel is symmetric and positive")
{
  const GaussLegendre rule(16);
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k)
  {
    const RteMedium m = gaussian(10.0 * u(g), u(g), u(g), 0.2 + 0.4 * u(g));
    const Point x{u(g), u(g)}, y{u(g), u(g)};
    const double kxy = attenuation_kernel(x, y, m, rule), kyx = attenuation_kernel(y, x, m, rule);
    CHECK(kxy > 0.0);
    CHECK(std::abs(kxy - kyx) <= 1e-12 * kxy);
  }
}

TEST_CASE("self-cell integral of 1/r")
{
  for (auto [a, b] : {std::pair{0.5, 0.5}, std::pair{0.02, 0.05}, std::pair{0.3, 0.1}})
  {
    // Eight right triangles around the centre: integral over angle of the edge distance.
    auto fan = [](double near, double far)
    {
      const double top = std::atan2(far, near);
      const int k = 200000;
      double s = 0.0;
      for (int i = 0; i < k; ++i)
      {
        const double t = (i + 0.5) * top / k;
        s += near / std::cos(t);
      }
      return s * top / k;
    };
    const double expected = 4.0 * (fan(a, b) + fan(b, a));
    CHECK(rectangle_inverse_distance(a, b) == doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(rectangle_inverse_distance(0.5, 0.5) == doctest::Approx(4.0 * std::log(1.0 + std::sqrt(2.0))));
}

TEST_CASE("collocation grid")
{
  const RteDiscretization d(6);
  CHECK(d.size() == 36);
  double area = 0.0;
  for (double w : d.weight)
  {
    CHECK(w > 0.0);
    area += w;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
  const GaussLegendre g(6);
  CHECK(d.x1[1] == doctest::Approx(g.nodes[1]));
  CHECK(d.x2[6] == doctest::Approx(g.nodes[1]));
  CHECK(d.x1[6] == doctest::Approx(g.nodes[0]));
}

TEST_CASE("source term values")
{
  CHECK(source_term({0.5, 0.5}) == 1.0);
  CHECK(source_term({0.25, 0.5}) == doctest::Approx(std::exp(-16.0)).epsilon(1e-14));
  CHECK(source_term({0.25, 0.5}) == doctest::Approx(1.125e-7).epsilon(1e-3));
}

TEST_CASE("operator structure")
{
  auto disc = std::make_shared<const RteDiscretization>(8);
  auto rule = std::make_shared<const GaussLegendre>(16);
  RteMedium m = gaussian(6.0, 0.3, 0.7, 0.4);

  RteMedium none = m;
  none.scattering_scale = 0.0;
  const RteOperator zero(none, disc, rule);
  CHECK(zero.dense().cwiseAbs().maxCoeff() == 0.0);
  CHECK(rte_rhs(zero, *disc).norm() == 0.0);

  const RteOperator base(m, disc, rule);
  RteMedium scaled = m;
  scaled.scattering_scale = 2.5;
  const RteOperator twice(scaled, disc, rule);
  const Matrix b = base.dense(), b2 = twice.dense();
  for (auto [i, j] : {std::pair{0, 5}, std::pair{17, 3}, std::pair{40, 40}})
  {
    CHECK(b2(i, j) == doctest::Approx(2.5 * b(i, j)).epsilon(1e-14));
  }

  for (Index i = 0; i < b.rows(); ++i)
  {
    for (Index j = 0; j < b.cols(); ++j)
    {
      if (i != j)
      {
        CHECK(b(i, j) < 0.0);
        const Point xi = disc->point(i), xj = disc->point(j);
        const double expected =
            -m.mu_s(xi) * attenuation_kernel(xi, xj, m, *rule) * disc->weight[static_cast<std::size_t>(j)];
        CHECK(b(i, j) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
    const double diag = -m.mu_s(disc->point(i)) / (2.0 * pi) * disc->self_cell[static_cast<std::size_t>(i)];
    CHECK(b(i, i) == doctest::Approx(diag).epsilon(1e-14));
  }

  std::mt19937_64 g(11);
  const Vector v = oracle::gaussian(64, 1, g);
  CHECK(oracle::rel(base.apply(v), b * v) <= 1e-12);
  CHECK(oracle::rel(rte_rhs(base, *disc), -(b * disc->source)) <= 1e-12);
}

TEST_CASE("parameter grid enumeration")
{
  RteConfig c;
  c.amplitudes = {2.0};
  c.widths = {0.2};
  c.grid_n = 1;
  const SampleSpace corners = build_parameter_grid(c);
  REQUIRE(corners.size() == 4);
  std::set<std::pair<double, double>> seen;
  for (const auto &w : corners)
  {
    CHECK(w.coefficients[0] == 2.0);
    CHECK(w.coefficients[3] == 0.2);
    seen.insert({w.coefficients[1], w.coefficients[2]});
  }
  CHECK(seen == std::set<std::pair<double, double>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  c.amplitudes = {2.0, 4.0, 6.0, 8.0, 10.0};
  c.widths = {0.2, 0.3, 0.4, 0.5, 0.6};
  c.grid_n = 20;
  CHECK(build_parameter_grid(c).size() == 11025);

  c.amplitudes = {2.0, 4.0};
  c.widths = {0.2};
  c.grid_n = 4;
  const SampleSpace fifty = build_parameter_grid(c);
  CHECK(fifty.size() == 50);
  std::set<std::vector<double>> distinct;
  for (const auto &w : fifty)
  {
    distinct.insert(w.coefficients);
  }
  CHECK(distinct.size() == 50);

  CHECK(build_parameter_grid(RteConfig{}).size() == 441);
}

TEST_CASE("offset path equals the monolithic operator")
{
  const RteOracle o(tiny());
  const SampleSpace omega = build_parameter_grid(tiny());
  for (const auto &w : omega)
  {
    const auto op = o.fine_operator(w);
    Matrix l = op->dense();
    l.diagonal().array() += 1.0;
    const Vector f = -(op->dense() * o.fine_discretization().source);
    const Vector mono = l.lu().solve(f);
    const FineSolution s = o.fine_solve(w);
    CHECK(oracle::rel(s.solution, mono) <= 1e-10);
    CHECK(oracle::rel(s.rhs, o.rhs(w)) <= 1e-12);

    const Matrix q = Matrix::Identity(64, 64);
    const Vector reduced = (op->project(q) + o.offset_project(q)).lu().solve(q.transpose() * f);
    CHECK(oracle::rel(reduced, mono) <= 1e-10);
  }
}

TEST_CASE("interpolated RTE right-hand sides")
{
  const RteOracle o(tiny());
  const SampleSpace omega = build_parameter_grid(tiny());
  OfflineOptions opts;
  opts.thresholds.epsilon = 1e-4;
  opts.op_columns = 8;
  opts.seed = 2;
  const OfflineResult r = run_offline(o, omega, opts);
  REQUIRE(r.model.projected_rhs.has_value());
  const Matrix &q = r.model.basis;
  const auto cols = r.skeletons.operator_indices();
  const Eigen::JacobiSVD<Matrix> svd(r.operator_samples(Eigen::all, cols));
  const Vector sv = svd.singularValues();
  REQUIRE(sv(sv.size() - 1) > 1e-6 * sv(0));
  for (Index i : cols)
  {
    const Vector expected = q.transpose() * o.rhs(omega[i]);
    CHECK(oracle::rel(reduced_rhs_interpolated(r.model, i), expected) <= 1e-8);
  }

  OfflineOptions one = opts;
  one.max_skeletons = 1;
  one.enrich = false;
  const OfflineResult single = run_offline(o, omega, one);
  const Vector base = single.model.projected_rhs->col(0);
  for (Index i = 0; i < omega.size(); ++i)
  {
    CHECK(oracle::rel(reduced_rhs_interpolated(single.model, i), single.model.mixing(0, i) * base) <= 1e-14);
  }

  const ScaledScattering affine;
  std::vector<std::vector<double>> scales;
  for (int k = 0; k < 12; ++k)
  {
    scales.push_back({0.2 + 0.15 * k});
  }
  const SampleSpace s_omega(scales);
  const OfflineResult ra = run_offline(affine, s_omega, opts);
  for (Index i = 0; i < s_omega.size(); ++i)
  {
    const Vector expected = ra.model.basis.transpose() * affine.rhs(s_omega[i]);
    CHECK(oracle::rel(reduced_rhs_interpolated(ra.model, i), expected) <= 1e-10);
  }
}

TEST_CASE("mean density converges under grid refinement")
{
  RteMedium m = gaussian(2.0, 0.45, 0.55, 0.4);
  auto rule = std::make_shared<const GaussLegendre>(16);
  auto mean_density = [&](Index side)
  {
    auto disc = std::make_shared<const RteDiscretization>(side);
    const RteOperator op(m, disc, rule);
    Matrix l = op.dense();
    const Vector f = -(l * disc->source);
    l.diagonal().array() += 1.0;
    const Vector u = l.lu().solve(f);
    double sum = 0.0;
    for (Index k = 0; k < disc->size(); ++k)
    {
      sum += disc->weight[static_cast<std::size_t>(k)] * u(k) / m.mu_s(disc->point(k));
    }
    return sum;
  };
  const double d6 = mean_density(6), d12 = mean_density(12), d24 = mean_density(24),
               d48 = mean_density(48);
  const double e1 = std::abs(d12 - d6), e2 = std::abs(d24 - d12), e3 = std::abs(d48 - d24);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}

TEST_CASE("coarse solve is the dense solve on the coarse grid")
{
  const RteOracle o(tiny());
  const SampleSpace omega = build_parameter_grid(tiny());
  auto disc = std::make_shared<const RteDiscretization>(4);
  auto rule = std::make_shared<const GaussLegendre>(16);
  const RteOperator op(RteMedium::from_sample(omega[3], 1.0), disc, rule);
  Matrix l = op.dense();
  const Vector f = -(l * disc->source);
  l.diagonal().array() += 1.0;
  CHECK(oracle::rel(o.coarse_solve(omega[3]), l.lu().solve(f)) <= 1e-12);
}

TEST_CASE("gaussian sign flag")
{
  RteMedium plus = gaussian(3.0, 0.5, 0.5, 0.3);
  RteMedium minus = plus;
  minus.sign = -1.0;
  const Point p{0.6, 0.7};
  CHECK(plus.mu_t(p) == doctest::Approx(1.0 + 3.0 * std::exp(-(0.01 + 0.04) / 0.09)));
  CHECK(minus.mu_t(p) == doctest::Approx(1.0 + 3.0 * std::exp(-(0.01 - 0.04) / 0.09)));
}

TEST_CASE("RTE configuration validation")
{
  RteConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_coarse = 32;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RteConfig{};
  c.line_order = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RteConfig{};
  c.widths = {0.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(RteMedium::from_sample({0, {1.0, 2.0}}, 1.0), ConfigError);
}
