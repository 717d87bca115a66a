// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/sweep.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace proxyrb
{

namespace
{

std::string sanitize(std::string s)
{
  for (char &c : s)
  {
    if (c == ',' || c == '\n' || c == '\r')
    {
      c = ';';
    }
  }
  return s;
}

std::vector<std::string> split(const std::string &line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
  {
    out.push_back(cell);
  }
  return out;
}

}  // namespace

SweepReport run_sweep(const ProblemOracle &oracle, const SampleSpace &omega,
                      const std::vector<double> &epsilons, const OfflineOptions &base,
                      const ReferenceSolutions &reference, const SweepObserver &observe)
{
  SweepReport report;
  for (double eps : epsilons)
  {
    SweepRow row;
    row.epsilon = eps;
    row.t_fine = reference.t_fine;
    try
    {
      OfflineOptions opts = base;
      opts.thresholds.epsilon = eps;
      const OfflineResult off = run_offline(oracle, omega, opts);
      const ReducedModel &model = off.model;
      row.s = model.skeleton_count();
      row.s_additional = static_cast<Index>(model.additional.size());
      row.n_rb = model.reduced_dimension();
      row.t_offline = model.timings.total;
      row.t_coarse = model.timings.coarse_sweep;
      const ErrorReport err = batch_evaluate(model, oracle, omega, &reference, base.jobs);
      row.t_online = err.t_online;
      row.mean_error = err.mean_error;
      row.failed = static_cast<Index>(err.failures.size());
      if (row.failed == omega.size())
      {
        row.status = "error: every reduced solve failed";
      }
      if (observe)
      {
        observe(eps, off, err);
      }
    }
    catch (const std::exception &e)
    {
      row.status = sanitize(fmt::format("error: {}", e.what()));
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_sweep_csv(std::ostream &out, const SweepReport &report)
{
  fmt::print(out, "{}\n", kSweepHeader);
  for (const auto &r : report.rows)
  {
    fmt::print(out, "{:.6g},{},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.9e},{},{}\n", r.epsilon,
               r.s, r.s_additional, r.n_rb, r.t_offline, r.t_coarse, r.t_online, r.t_fine,
               r.speedup(), r.mean_error, r.failed, r.status);
  }
}

void write_convergence_csv(std::ostream &out, const SweepReport &report)
{
  fmt::print(out, "{}\n", kConvergenceHeader);
  for (const auto &r : report.rows)
  {
    if (r.ok() && r.mean_error > 0.0)
    {
      fmt::print(out, "{:.9f},{:.9f}\n", std::log10(r.epsilon), std::log10(r.mean_error));
    }
  }
}

void write_online_csv(std::ostream &out, const ErrorReport &report)
{
  const bool errs = report.has_errors();
  fmt::print(out, "{}\n", errs ? "index,rel_l2_error,t_solve" : "index,t_solve");
  double total = 0.0;
  for (std::size_t k = 0; k < report.solve_seconds.size(); ++k)
  {
    total += report.solve_seconds[k];
    if (errs)
    {
      fmt::print(out, "{},{:.17g},{:.3e}\n", k, report.errors[k], report.solve_seconds[k]);
    }
    else
    {
      fmt::print(out, "{},{:.3e}\n", k, report.solve_seconds[k]);
    }
  }
  const double mean_t =
      report.solve_seconds.empty() ? 0.0 : total / static_cast<double>(report.solve_seconds.size());
  if (errs)
  {
    fmt::print(out, "mean,{:.17g},{:.3e}\n", report.mean_error, mean_t);
  }
  else
  {
    fmt::print(out, "mean,{:.3e}\n", mean_t);
  }
}

SweepReport read_sweep_csv(std::istream &in)
{
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
  {
    throw ConfigError("not a sweep CSV (unexpected header)");
  }
  SweepReport report;
  while (std::getline(in, line))
  {
    if (line.empty())
    {
      continue;
    }
    const auto c = split(line);
    if (c.size() != 12)
    {
      throw ConfigError(fmt::format("malformed sweep CSV row: {}", line));
    }
    try
    {
      SweepRow r;
      r.epsilon = std::stod(c[0]);
      r.s = std::stoll(c[1]);
      r.s_additional = std::stoll(c[2]);
      r.n_rb = std::stoll(c[3]);
      r.t_offline = std::stod(c[4]);
      r.t_coarse = std::stod(c[5]);
      r.t_online = std::stod(c[6]);
      r.t_fine = std::stod(c[7]);
      r.mean_error = std::stod(c[9]);
      r.failed = std::stoll(c[10]);
      r.status = c[11];
      report.rows.push_back(r);
    }
    catch (const std::logic_error &)
    {
      throw ConfigError(fmt::format("malformed sweep CSV row: {}", line));
    }
  }
  return report;
}

void write_sweep_table(std::ostream &out, const SweepReport &report)
{
  fmt::print(out, "{:>10} {:>6} {:>6} {:>11} {:>10} {:>10} {:>9} {:>13}  {}\n", "epsilon", "s",
             "n_rb", "T_offline", "T_online", "T_fine", "speedup", "mean_rel_L2", "status");
  for (const auto &r : report.rows)
  {
    fmt::print(out, "{:>10.3g} {:>6} {:>6} {:>11.3f} {:>10.3f} {:>10.3f} {:>9.2f} {:>13.4e}  {}\n",
               r.epsilon, r.s, r.n_rb, r.t_offline, r.t_online, r.t_fine, r.speedup(),
               r.mean_error, r.status);
  }
}

double convergence_slope(const SweepReport &report)
{
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto &r : report.rows)
  {
    if (!r.ok() || !(r.mean_error > 0.0))
    {
      continue;
    }
    const double x = std::log(r.epsilon), y = std::log(r.mean_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2)
  {
    return std::nan("");
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace proxyrb
