// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_SWEEP_HPP
#define PROXYRB_SWEEP_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "proxyrb/online.hpp"

namespace proxyrb
{

struct SweepRow
{
  double epsilon = 0.0;
  Index s = 0;  // fine skeleton solves, |S| + |A|
  Index s_additional = 0;
  Index n_rb = 0;
  double t_offline = 0.0;  // includes the coarse sweep
  double t_coarse = 0.0;
  double t_online = 0.0;
  double t_fine = 0.0;
  double mean_error = 0.0;
  Index failed = 0;
  std::string status = "ok";

  double speedup() const { return t_fine / (t_offline + t_online); }
  bool ok() const { return status == "ok"; }
};

struct SweepReport
{
  std::vector<SweepRow> rows;
};

// One offline + online run per epsilon against a single shared set of reference solutions.
// A failing epsilon becomes a row with status "error: ..." instead of aborting the sweep.
// `observe` sees every successful offline/online pair.
using SweepObserver = std::function<void(double eps, const OfflineResult &, const ErrorReport &)>;

SweepReport run_sweep(const ProblemOracle &oracle, const SampleSpace &omega,
                      const std::vector<double> &epsilons, const OfflineOptions &base,
                      const ReferenceSolutions &reference, const SweepObserver &observe = {});

inline constexpr const char *kSweepHeader =
    "epsilon,s,s_additional,n_rb,t_offline,t_coarse,t_online,t_fine,speedup,mean_rel_l2,failed,"
    "status";
inline constexpr const char *kConvergenceHeader = "log10_epsilon,log10_mean_rel_l2";

void write_sweep_csv(std::ostream &out, const SweepReport &report);
void write_convergence_csv(std::ostream &out, const SweepReport &report);
// Columns: index,[rel_l2_error,]t_solve,status; a final "mean" row summarizes.
void write_online_csv(std::ostream &out, const ErrorReport &report);

SweepReport read_sweep_csv(std::istream &in);
// Fixed-width table with the same columns as the CSV.
void write_sweep_table(std::ostream &out, const SweepReport &report);

// Least-squares slope of log(mean error) against log(epsilon) over the successful rows.
double convergence_slope(const SweepReport &report);

}  // namespace proxyrb

#endif  // PROXYRB_SWEEP_HPP
