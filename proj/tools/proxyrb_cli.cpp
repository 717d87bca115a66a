// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "proxyrb/config.hpp"
#include "proxyrb/model_io.hpp"
#include "proxyrb/sweep.hpp"

namespace fs = std::filesystem;
using namespace proxyrb;

namespace
{

struct Flags
{
  std::string config;
  std::string model;
  std::string out;
  bool with_reference = false;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve(const Flags &f)
{
  RunConfig c = load_config(f.config);
  if (f.jobs)
  {
    c.jobs = *f.jobs;
  }
  if (f.seed)
  {
    c.seed = *f.seed;
  }
  if (!f.out.empty())
  {
    c.out = f.out;
  }
  c.validate();
  fs::create_directories(c.out);
  return c;
}

std::ofstream open_out(const fs::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw ConfigError(fmt::format("cannot write {}", path.string()));
  }
  return out;
}

fs::path model_path(const RunConfig &c, double eps)
{
  if (c.epsilons.size() == 1)
  {
    return fs::path(c.out) / "model.rbm";
  }
  return fs::path(c.out) / fmt::format("model_eps{:g}.rbm", eps);
}

void cmd_offline(const Flags &f)
{
  const RunConfig c = resolve(f);
  const Problem p = make_problem(c);
  for (double eps : c.epsilons)
  {
    const OfflineResult r = run_offline(*p.oracle, p.omega, c.offline_options(eps));
    for (const auto &w : r.warnings)
    {
      fmt::print(std::cerr, "warning: {}\n", w);
    }
    const fs::path path = model_path(c, eps);
    save_model(path, r.model);
    fmt::print("epsilon={:g} s={} s_additional={} n_rb={} t_offline={:.3f} t_coarse={:.3f} model={}\n",
               eps, r.model.skeleton_count(), r.model.additional.size(),
               r.model.reduced_dimension(), r.model.timings.total, r.model.timings.coarse_sweep,
               path.string());
  }
}

void cmd_online(const Flags &f)
{
  const RunConfig c = resolve(f);
  const fs::path path = f.model.empty() ? fs::path(c.out) / "model.rbm" : fs::path(f.model);
  const ReducedModel model = load_model(path);
  const Problem p = make_problem(c);
  std::optional<ReferenceSolutions> ref;
  if (f.with_reference)
  {
    ref = reference_solutions(*p.oracle, p.omega, c.jobs);
  }
  const ErrorReport report =
      batch_evaluate(model, *p.oracle, p.omega, ref ? &*ref : nullptr, c.jobs);
  for (const auto &fail : report.failures)
  {
    fmt::print(std::cerr, "sample {} failed: {}\n", fail.index, fail.message);
  }
  auto out = open_out(fs::path(c.out) / "online.csv");
  write_online_csv(out, report);
  fmt::print("samples={} failed={} t_online={:.3f}", p.omega.size(), report.failures.size(),
             report.t_online);
  if (ref)
  {
    fmt::print(" t_fine={:.3f} mean_rel_l2={:.6e}", ref->t_fine, report.mean_error);
  }
  fmt::print("\n");
}

void cmd_sweep(const Flags &f)
{
  const RunConfig c = resolve(f);
  if (c.epsilons.size() < 2)
  {
    throw ConfigError("sweep needs at least two epsilon values");
  }
  const Problem p = make_problem(c);
  const ReferenceSolutions ref = reference_solutions(*p.oracle, p.omega, c.jobs);
  const SweepReport report = run_sweep(*p.oracle, p.omega, c.epsilons,
                                       c.offline_options(c.epsilons.front()), ref);
  auto sweep = open_out(fs::path(c.out) / "sweep.csv");
  write_sweep_csv(sweep, report);
  auto conv = open_out(fs::path(c.out) / "convergence.csv");
  write_convergence_csv(conv, report);
  write_sweep_table(std::cout, report);
}

void cmd_report(const Flags &f)
{
  fs::path path = f.out.empty() ? fs::path("sweep.csv") : fs::path(f.out);
  if (fs::is_directory(path))
  {
    path /= "sweep.csv";
  }
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError(fmt::format("cannot open {}", path.string()));
  }
  const SweepReport report = read_sweep_csv(in);
  write_sweep_table(std::cout, report);
  const double slope = convergence_slope(report);
  if (std::isfinite(slope))
  {
    fmt::print("log-log slope of mean error vs epsilon: {:.3f}\n", slope);
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Coarse-proxy reduced basis solver for parameterized integral equations"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App *sub)
  {
    sub->add_option("--config", f.config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory (overrides run.out)");
    sub->add_option("--jobs", f.jobs, "parallel per-sample jobs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "run seed (overrides run.seed)");
  };

  auto *offline = app.add_subcommand("offline", "build and save reduced models");
  common(offline);
  auto *online = app.add_subcommand("online", "solve every sample with a saved model");
  common(online);
  online->add_option("--model", f.model, "model file (default <out>/model.rbm)");
  online->add_flag("--with-reference", f.with_reference, "also fine-solve every sample and report errors");
  auto *sweep = app.add_subcommand("sweep", "offline + online for every epsilon, with reference errors");
  common(sweep);
  sweep->add_flag("--with-reference", f.with_reference, "accepted for symmetry; sweeps always compute references");
  auto *report = app.add_subcommand("report", "print a saved sweep.csv as a table");
  report->add_option("--out", f.out, "sweep.csv or the directory holding it");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try
  {
    if (*offline)
    {
      cmd_offline(f);
    }
    else if (*online)
    {
      cmd_online(f);
    }
    else if (*sweep)
    {
      cmd_sweep(f);
    }
    else
    {
      cmd_report(f);
    }
  }
  catch (const ConfigError &e)
  {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  catch (const NumericalError &e)
  {
    fmt::print(std::cerr, "numerical failure: {}\n", e.what());
    return 2;
  }
  catch (const fs::filesystem_error &e)
  {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  catch (const std::exception &e)
  {
    fmt::print(std::cerr, "numerical failure: {}\n", e.what());
    return 2;
  }
  return 0;
}
