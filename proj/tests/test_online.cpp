// SPDX-License-Identifier: Apache-2.0

#include <chrono>

#include <doctest.h>

#include "oracles.hpp"
#include "proxyrb/online.hpp"
#include "proxyrb/synthetic_affine.hpp"
#include "toy_oracle.hpp"

using namespace proxyrb;

namespace
{

OfflineOptions options(double eps, Index op_columns)
{
  OfflineOptions o;
  o.thresholds.epsilon = eps;
  o.op_columns = op_columns;
  o.seed = 3;
  return o;
}

// Hand-built model on a 2 x 2 toy problem: one skeleton operator, sample 1 gets a zero
// mixing weight and therefore a singular reduced operator.
ReducedModel singular_model()
{
  ReducedModel m;
  m.problem = "toy";
  m.fine_dimension = 2;
  m.sample_count = 2;
  m.skeletons = {0};
  m.basis = Matrix::Identity(2, 2);
  m.singular_values = Vector::Ones(2);
  m.mixing = Matrix{{1.0, 0.0}};
  m.projected_operators = Matrix::Identity(2, 2).reshaped(4, 1);
  return m;
}

}  // namespace

TEST_CASE("reduced operator at a skeleton is the projected skeleton operator")
{
  const toy::Oracle o = toy::random_family(24, 30, 51, 12, true);
  const SampleSpace omega = toy::random_samples(30, 2, 52);
  const OfflineResult r = run_offline(o, omega, options(1e-3, 3));
  const Matrix &q = r.model.basis;
  for (Index i : r.skeletons.operator_indices())
  {
    const Matrix expected = q.transpose() * o.dense(omega[i]) * q;
    CHECK(oracle::rel(assemble_reduced_operator(r.model, i), expected) <= 1e-8);
  }
  CHECK_THROWS_AS(assemble_reduced_operator(r.model, omega.size()), ConfigError);
  CHECK_THROWS_AS(assemble_reduced_operator(r.model, Index{-1}), ConfigError);
  CHECK_THROWS_AS(assemble_reduced_operator(r.model, Vector::Zero(r.model.skeleton_count() + 1)),
                  ConfigError);
}

TEST_CASE("a single skeleton makes every reduced operator a multiple of it")
{
  const synthetic::SyntheticAffineOracle o(synthetic::make_affine_family(20, 3, 53));
  const SampleSpace omega = synthetic::affine_samples(15, 54);
  OfflineOptions opts = options(1e-3, 2);
  opts.max_skeletons = 1;
  opts.enrich = false;
  const OfflineResult r = run_offline(o, omega, opts);
  REQUIRE(r.model.skeleton_count() == 1);
  const Matrix offset = *r.model.projected_offset;
  const Matrix b0 = r.model.projected_operators.col(0).reshaped(r.model.reduced_dimension(),
                                                                r.model.reduced_dimension());
  for (Index i = 0; i < omega.size(); ++i)
  {
    const Matrix varying = assemble_reduced_operator(r.model, i) - offset;
    const double scale = r.model.mixing(0, i);
    CHECK(oracle::rel(varying, scale * b0) <= 1e-12);
  }
}

TEST_CASE("affine family: interpolated operators equal dense projection everywhere")
{
  const synthetic::SyntheticAffineOracle o(synthetic::make_affine_family(64, 3, 55));
  const SampleSpace omega = synthetic::affine_samples(200, 56);
  const OfflineResult r = run_offline(o, omega, options(1e-8, 4));
  const Matrix &q = r.model.basis;
  for (Index i = 0; i < omega.size(); ++i)
  {
    const Matrix expected = q.transpose() * o.family().full(omega[i].coefficients[0]) * q;
    CHECK(oracle::rel(assemble_reduced_operator(r.model, i), expected) <= 1e-10);
  }
}

TEST_CASE("reduced solve with a one-dimensional basis is a scalar division")
{
  const toy::Oracle o = toy::random_family(10, 2, 57);
  const SampleSpace omega({{0.4, 0.4}, {0.4, 0.4}});
  const OfflineResult r = run_offline(o, omega, options(1e-3, 2));
  REQUIRE(r.model.reduced_dimension() == 1);
  const Vector q = r.model.basis.col(0);
  const double l = q.dot(o.dense(omega[1]) * q);
  const double f = q.dot(o.rhs(omega[1]));
  const ReducedSolveResult s = reduced_solve(r.model, o, omega, 1);
  CHECK(s.coefficients(0) == doctest::Approx(f / l).epsilon(1e-12));
  CHECK(oracle::rel(s.lifted_solution, q * (f / l)) <= 1e-12);
  CHECK(s.sample_index == 1);
}

TEST_CASE("reduced solve at skeletons of a smooth family")
{
  const toy::Oracle o = toy::random_family(24, 30, 59, 12, true);
  const SampleSpace omega = toy::random_samples(30, 2, 60);
  for (double eps : {1e-2, 1e-4})
  {
    const OfflineResult r = run_offline(o, omega, options(eps, 3));
    const auto cols = r.skeletons.operator_indices();
    for (std::size_t j = 0; j < cols.size(); ++j)
    {
      const Vector u = r.skeletons.solutions.col(static_cast<Index>(j));
      const Vector urb = reduced_solve(r.model, o, omega, cols[j]).lifted_solution;
      CHECK(relative_l2_error(u, urb) <= 10.0 * eps);
    }
  }
}

TEST_CASE("affine family with a full basis reproduces fine solves")
{
  const synthetic::SyntheticAffineOracle o(synthetic::make_affine_family(24, 3, 61));
  const SampleSpace omega = synthetic::affine_samples(60, 62);
  const OfflineResult r = run_offline(o, omega, options(1e-12, 4));
  ReducedModel full = r.model;
  full.basis = Matrix::Identity(24, 24);
  full.projected_operators = project_skeleton_operators(r.skeletons, full.basis);
  full.projected_offset = o.offset_project(full.basis);
  for (Index i = 0; i < omega.size(); ++i)
  {
    const Vector u = o.fine_solve(omega[i]).solution;
    CHECK(relative_l2_error(u, reduced_solve(full, o, omega, i).lifted_solution) <= 1e-8);
  }
}

TEST_CASE("interpolated right-hand sides")
{
  const synthetic::SyntheticAffineOracle o(synthetic::make_affine_family(24, 3, 63),
                                           RhsMode::Interpolated);
  const SampleSpace omega = synthetic::affine_samples(40, 64);
  const OfflineResult r = run_offline(o, omega, options(1e-6, 4));
  REQUIRE(r.model.projected_rhs.has_value());
  CHECK(r.model.projected_rhs->cols() == r.model.skeleton_count());
  for (Index i = 0; i < omega.size(); ++i)
  {
    const Vector expected = *r.model.projected_rhs * r.model.mixing.col(i);
    CHECK(oracle::rel(reduced_rhs_interpolated(r.model, i), expected) <= 1e-14);
  }
  ReducedModel direct = r.model;
  direct.projected_rhs.reset();
  CHECK_THROWS_AS(reduced_rhs_interpolated(direct, 0), ConfigError);
}

TEST_CASE("online invariants: Galerkin residual, lift in span, interpolation linearity")
{
  const toy::Oracle o = toy::random_family(24, 30, 65, 12, true);
  const SampleSpace omega = toy::random_samples(30, 2, 66);
  const OfflineResult r = run_offline(o, omega, options(1e-3, 3));
  const ReducedModel &m = r.model;
  const Matrix &q = m.basis;
  for (Index i = 0; i < omega.size(); ++i)
  {
    const ReducedSolveResult s = reduced_solve(m, o, omega, i);
    const Matrix l = assemble_reduced_operator(m, i);
    const Vector f = q.transpose() * o.rhs(omega[i]);
    CHECK((l * s.coefficients - f).norm() <= 1e-10 * f.norm());
    CHECK((q * (q.transpose() * s.lifted_solution) - s.lifted_solution).norm() <=
          1e-12 * s.lifted_solution.norm());
  }
  const double alpha = 0.3, beta = -1.7;
  const Vector mi = m.mixing.col(2), mj = m.mixing.col(7);
  const Matrix combined = assemble_reduced_operator(m, Vector(alpha * mi + beta * mj));
  const Matrix vi = assemble_reduced_operator(m, mi), vj = assemble_reduced_operator(m, mj);
  CHECK(oracle::rel(combined, alpha * vi + beta * vj) <= 1e-12);
}

TEST_CASE("batch evaluation when every sample is a skeleton")
{
  const toy::Oracle o = toy::random_family(20, 3, 67);
  const SampleSpace omega = toy::random_samples(4, 3, 68);
  const double eps = 1e-6;
  const OfflineResult r = run_offline(o, omega, options(eps, 2));
  REQUIRE(r.model.skeleton_count() == omega.size());
  const ReferenceSolutions ref = reference_solutions(o, omega);
  const ErrorReport e = batch_evaluate(r.model, o, omega, &ref);
  CHECK(e.has_errors());
  CHECK(e.errors.size() == 4);
  CHECK(e.mean_error <= 10.0 * eps);
  CHECK(e.failures.empty());
}

TEST_CASE("batch evaluation without a reference reports timings only")
{
  const toy::Oracle o = toy::random_family(20, 3, 69);
  const SampleSpace omega = toy::random_samples(12, 3, 70);
  const OfflineResult r = run_offline(o, omega, options(1e-3, 2));
  const ErrorReport e = batch_evaluate(r.model, o, omega, nullptr, 2);
  CHECK_FALSE(e.has_errors());
  CHECK(e.solve_seconds.size() == 12);
  CHECK_FALSE(e.t_fine.has_value());
  CHECK(e.t_online >= 0.0);
}

TEST_CASE("batch evaluation records failing samples and keeps going")
{
  const toy::Oracle o(Matrix::Identity(2, 2), {}, Vector::Ones(2), 2);
  const SampleSpace omega({{}, {}});
  const ReducedModel m = singular_model();
  CHECK_THROWS_WITH_AS(reduced_solve(m, o, omega, 1), doctest::Contains("reduced system ill-conditioned"),
                       NumericalError);
  const ReferenceSolutions ref = reference_solutions(o, omega);
  const ErrorReport e = batch_evaluate(m, o, omega, &ref);
  REQUIRE(e.failures.size() == 1);
  CHECK(e.failures[0].index == 1);
  CHECK(std::isnan(e.errors[1]));
  CHECK(e.errors[0] <= 1e-14);
  CHECK(e.mean_error == e.errors[0]);
}

TEST_CASE("batch evaluation rejects a model from another problem")
{
  const toy::Oracle o(Matrix::Identity(2, 2), {}, Vector::Ones(2), 2);
  ReducedModel m = singular_model();
  CHECK_THROWS_AS(batch_evaluate(m, o, SampleSpace({{}, {}, {}})), ConfigError);
  m.problem = "rte";
  CHECK_THROWS_AS(batch_evaluate(m, o, SampleSpace({{}, {}})), ConfigError);
  const toy::Oracle bigger(Matrix::Identity(3, 3), {}, Vector::Ones(3), 3);
  m.problem = "toy";
  CHECK_THROWS_AS(batch_evaluate(m, bigger, SampleSpace({{}, {}})), ConfigError);
}

TEST_CASE("relative L2 error")
{
  const Vector u{{3.0, 4.0}};
  CHECK(relative_l2_error(u, u) == 0.0);
  CHECK(relative_l2_error(u, Vector::Zero(2)) == doctest::Approx(1.0));
  CHECK(relative_l2_error(u, Vector{{3.0, 3.0}}) == doctest::Approx(0.2));
}

TEST_CASE("online time grows at most linearly in the number of samples")
{
  const synthetic::SyntheticAffineOracle o(synthetic::make_affine_family(32, 3, 71));
  auto timed = [&](Index p)
  {
    const SampleSpace omega = synthetic::affine_samples(p, 72);
    const OfflineResult r = run_offline(o, omega, options(1e-6, 4));
    double best = 1e300;
    for (int k = 0; k < 3; ++k)
    {
      best = std::min(best, batch_evaluate(r.model, o, omega).t_online);
    }
    return best;
  };
  const double small = timed(200), large = timed(800);
  CHECK(large <= 4.0 * small * 3.0 + 0.02);
}
