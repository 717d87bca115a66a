// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_CONFIG_HPP
#define PROXYRB_CONFIG_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxyrb/laplace_bie.hpp"
#include "proxyrb/offline.hpp"
#include "proxyrb/rte.hpp"

namespace proxyrb
{

struct SyntheticConfig
{
  Index n = 64;
  Index rank = 3;
  Index samples = 200;
};

struct RunConfig
{
  std::string problem;
  std::vector<double> epsilons{1e-3};
  double eta = 1.5;
  std::uint64_t seed = 0;
  Index op_columns = 0;
  bool enrich = true;
  bool append_solutions = true;
  std::optional<RhsMode> rhs_mode;  // unset keeps the driver default
  int jobs = 1;
  std::string out = ".";

  bie::BieConfig bie;
  rte::RteConfig rte;
  SyntheticConfig synthetic;

  void validate() const;
  OfflineOptions offline_options(double epsilon) const;
};

// INI-style text: [section] headers, `key = value` lines, `;` or `#` comments, lists
// comma-separated. Unknown sections or keys throw ConfigError.
RunConfig parse_config(std::istream &in);
RunConfig load_config(const std::filesystem::path &path);

struct Problem
{
  std::unique_ptr<ProblemOracle> oracle;
  SampleSpace omega;
};

Problem make_problem(const RunConfig &config);

}  // namespace proxyrb

#endif  // PROXYRB_CONFIG_HPP
