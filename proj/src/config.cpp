// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "proxyrb/synthetic_affine.hpp"

namespace proxyrb
{

namespace
{

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys = {
    {"run",
     {"problem", "epsilon", "eta", "seed", "op_columns", "enrich", "append_solutions", "rhs_mode",
      "jobs", "out"}},
    {"bie", {"kappa", "x0", "radial_nodes", "n_fine", "n_coarse", "samples"}},
    {"rte", {"n_fine", "n_coarse", "line_order", "amplitudes", "widths", "grid_n", "gaussian_sign"}},
    {"synthetic", {"n", "rank", "samples"}},
};

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string &key, const std::string &text)
{
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
  {
    throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", key, text));
  }
  return out;
}

std::vector<double> parse_list(const std::string &key, const std::string &text)
{
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size())
  {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_number<double>(key, piece));
    if (comma == std::string::npos)
    {
      break;
    }
    start = comma + 1;
  }
  return out;
}

bool parse_bool(const std::string &key, const std::string &text)
{
  const std::string v = trim(text);
  if (v == "true" || v == "on" || v == "yes" || v == "1")
  {
    return true;
  }
  if (v == "false" || v == "off" || v == "no" || v == "0")
  {
    return false;
  }
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, text));
}

void check_epsilon(double eps)
{
  if (!(eps > 0.0 && eps < 1.0))
  {
    throw ConfigError(fmt::format("run.epsilon {} outside (0, 1)", eps));
  }
}

}  // namespace

void RunConfig::validate() const
{
  if (problem != "laplace_bie" && problem != "rte" && problem != "synthetic_affine")
  {
    throw ConfigError(fmt::format(
        "run.problem must be laplace_bie, rte or synthetic_affine (got '{}')", problem));
  }
  if (epsilons.empty())
  {
    throw ConfigError("run.epsilon needs at least one value");
  }
  std::ranges::for_each(epsilons, check_epsilon);
  if (!(eta > 0.0))
  {
    throw ConfigError(fmt::format("run.eta {} must be positive", eta));
  }
  if (op_columns < 0)
  {
    throw ConfigError("run.op_columns must be >= 0");
  }
  if (jobs < 1)
  {
    throw ConfigError("run.jobs must be >= 1");
  }
  if (problem == "laplace_bie")
  {
    bie.validate();
  }
  else if (problem == "rte")
  {
    rte.validate();
  }
  else if (synthetic.n < 4 || synthetic.rank < 1 || synthetic.rank > synthetic.n ||
           synthetic.samples < 1)
  {
    throw ConfigError("synthetic needs n >= 4, 1 <= rank <= n and samples >= 1");
  }
}

OfflineOptions RunConfig::offline_options(double epsilon) const
{
  OfflineOptions o;
  o.thresholds = {epsilon, eta};
  o.enrich = enrich;
  o.append_solutions = append_solutions;
  o.op_columns = op_columns;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

RunConfig parse_config(std::istream &in)
{
  pt::ptree tree;
  try
  {
    pt::read_ini(in, tree);
  }
  catch (const pt::ini_parser_error &e)
  {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  RunConfig c;
  for (const auto &[section, body] : tree)
  {
    const auto allowed = kKeys.find(section);
    if (allowed == kKeys.end())
    {
      throw ConfigError(body.empty() ? fmt::format("config key '{}' outside any section", section)
                                     : fmt::format("unknown config section [{}]", section));
    }
    for (const auto &[key, node] : body)
    {
      if (!allowed->second.contains(key))
      {
        throw ConfigError(fmt::format("unknown config key {}.{}", section, key));
      }
      const std::string full = section + "." + key;
      const std::string v = trim(node.data());
      if (section == "run")
      {
        if (key == "problem") c.problem = v;
        else if (key == "epsilon") c.epsilons = parse_list(full, v);
        else if (key == "eta") c.eta = parse_number<double>(full, v);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(full, v);
        else if (key == "op_columns") c.op_columns = parse_number<Index>(full, v);
        else if (key == "enrich") c.enrich = parse_bool(full, v);
        else if (key == "append_solutions") c.append_solutions = parse_bool(full, v);
        else if (key == "jobs") c.jobs = parse_number<int>(full, v);
        else if (key == "out") c.out = v;
        else if (key == "rhs_mode")
        {
          if (v == "direct") c.rhs_mode = RhsMode::Direct;
          else if (v == "interpolated") c.rhs_mode = RhsMode::Interpolated;
          else if (v == "default") c.rhs_mode.reset();
          else throw ConfigError(fmt::format("{}: expected direct, interpolated or default", full));
        }
      }
      else if (section == "bie")
      {
        if (key == "kappa") c.bie.kappa = parse_number<double>(full, v);
        else if (key == "radial_nodes") c.bie.radial_nodes = parse_number<int>(full, v);
        else if (key == "n_fine") c.bie.n_fine = parse_number<Index>(full, v);
        else if (key == "n_coarse") c.bie.n_coarse = parse_number<Index>(full, v);
        else if (key == "samples") c.bie.samples = parse_number<Index>(full, v);
        else if (key == "x0")
        {
          const auto xy = parse_list(full, v);
          if (xy.size() != 2)
          {
            throw ConfigError(fmt::format("{}: expected two coordinates", full));
          }
          c.bie.x0 = {xy[0], xy[1]};
        }
      }
      else if (section == "rte")
      {
        if (key == "n_fine") c.rte.n_fine = parse_number<Index>(full, v);
        else if (key == "n_coarse") c.rte.n_coarse = parse_number<Index>(full, v);
        else if (key == "line_order") c.rte.line_order = parse_number<int>(full, v);
        else if (key == "amplitudes") c.rte.amplitudes = parse_list(full, v);
        else if (key == "widths") c.rte.widths = parse_list(full, v);
        else if (key == "grid_n") c.rte.grid_n = parse_number<int>(full, v);
        else if (key == "gaussian_sign")
        {
          if (v == "+") c.rte.gaussian_sign = 1.0;
          else if (v == "-") c.rte.gaussian_sign = -1.0;
          else throw ConfigError(fmt::format("{}: expected + or -", full));
        }
      }
      else
      {
        if (key == "n") c.synthetic.n = parse_number<Index>(full, v);
        else if (key == "rank") c.synthetic.rank = parse_number<Index>(full, v);
        else if (key == "samples") c.synthetic.samples = parse_number<Index>(full, v);
      }
    }
  }
  if (c.rhs_mode)
  {
    c.bie.rhs_mode = *c.rhs_mode;
    c.rte.rhs_mode = *c.rhs_mode;
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  }
  return parse_config(in);
}

Problem make_problem(const RunConfig &config)
{
  config.validate();
  Problem p;
  if (config.problem == "laplace_bie")
  {
    p.oracle = std::make_unique<bie::LaplaceBieOracle>(config.bie);
    p.omega = bie::sample_parameters(config.bie, config.seed);
  }
  else if (config.problem == "rte")
  {
    p.oracle = std::make_unique<rte::RteOracle>(config.rte);
    p.omega = rte::build_parameter_grid(config.rte);
  }
  else
  {
    auto family = synthetic::make_affine_family(config.synthetic.n, config.synthetic.rank,
                                                config.seed);
    p.oracle = std::make_unique<synthetic::SyntheticAffineOracle>(
        std::move(family), config.rhs_mode.value_or(RhsMode::Direct));
    p.omega = synthetic::affine_samples(config.synthetic.samples, config.seed + 1);
  }
  return p;
}

}  // namespace proxyrb
