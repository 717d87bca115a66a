// SPDX-License-Identifier: Apache-2.0

#include "proxyrb/model_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

namespace proxyrb
{

namespace
{

constexpr std::array<char, 8> kMagic{'P', 'R', 'X', 'R', 'B', 'M', '0', '1'};

template <typename T>
void put(std::ostream &out, T value)
{
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
  {
    std::ranges::reverse(bytes);
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream &in)
{
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T)))
  {
    throw ConfigError("model file is truncated");
  }
  if constexpr (std::endian::native == std::endian::big)
  {
    std::ranges::reverse(bytes);
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_matrix(std::ostream &out, const Matrix &m)
{
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  for (Index k = 0; k < m.size(); ++k)
  {
    put<double>(out, m.data()[k]);
  }
}

Matrix get_matrix(std::istream &in)
{
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0 || (cols > 0 && rows > (std::int64_t{1} << 40) / std::max<std::int64_t>(cols, 1)))
  {
    throw ConfigError(fmt::format("model file has an invalid matrix shape {}x{}", rows, cols));
  }
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k)
  {
    m.data()[k] = get<double>(in);
  }
  return m;
}

void put_indices(std::ostream &out, const std::vector<Index> &v)
{
  put<std::uint64_t>(out, v.size());
  for (Index i : v)
  {
    put<std::int64_t>(out, i);
  }
}

std::vector<Index> get_indices(std::istream &in)
{
  const auto n = get<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 32))
  {
    throw ConfigError("model file has an invalid index list length");
  }
  std::vector<Index> v(n);
  for (auto &i : v)
  {
    i = get<std::int64_t>(in);
  }
  return v;
}

void put_optional(std::ostream &out, const std::optional<Matrix> &m)
{
  put<std::uint8_t>(out, m ? 1 : 0);
  if (m)
  {
    put_matrix(out, *m);
  }
}

std::optional<Matrix> get_optional(std::istream &in)
{
  if (get<std::uint8_t>(in) == 0)
  {
    return std::nullopt;
  }
  return get_matrix(in);
}

}  // namespace

void write_model(std::ostream &out, const ReducedModel &model)
{
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint64_t>(out, model.problem.size());
  out.write(model.problem.data(), static_cast<std::streamsize>(model.problem.size()));
  put<double>(out, model.thresholds.epsilon);
  put<double>(out, model.thresholds.eta);
  put<std::uint32_t>(out, model.rhs_mode == RhsMode::Interpolated ? 1 : 0);
  put<std::int64_t>(out, model.fine_dimension);
  put<std::int64_t>(out, model.sample_count);
  put_indices(out, model.skeletons);
  put_indices(out, model.additional);
  put_matrix(out, model.basis);
  put_matrix(out, model.singular_values);
  put_matrix(out, model.mixing);
  put_matrix(out, model.projected_operators);
  put_optional(out, model.projected_offset);
  put_optional(out, model.projected_rhs);
  const auto &t = model.timings;
  for (double v : {t.coarse_sweep, t.fine_solves, t.operator_samples, t.enrichment, t.basis,
                   t.mixing, t.projection, t.total})
  {
    put<double>(out, v);
  }
  if (!out)
  {
    throw ConfigError("failed writing model");
  }
}

ReducedModel read_model(std::istream &in)
{
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
  {
    throw ConfigError("not a reduced model file (bad magic)");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kModelVersion)
  {
    throw ConfigError(fmt::format("unsupported model file version {}", version));
  }
  ReducedModel m;
  const auto len = get<std::uint64_t>(in);
  if (len > 4096)
  {
    throw ConfigError("model file has an invalid problem name");
  }
  m.problem.resize(len);
  if (!in.read(m.problem.data(), static_cast<std::streamsize>(len)))
  {
    throw ConfigError("model file is truncated");
  }
  m.thresholds.epsilon = get<double>(in);
  m.thresholds.eta = get<double>(in);
  m.rhs_mode = get<std::uint32_t>(in) == 1 ? RhsMode::Interpolated : RhsMode::Direct;
  m.fine_dimension = get<std::int64_t>(in);
  m.sample_count = get<std::int64_t>(in);
  m.skeletons = get_indices(in);
  m.additional = get_indices(in);
  m.basis = get_matrix(in);
  m.singular_values = get_matrix(in);
  m.mixing = get_matrix(in);
  m.projected_operators = get_matrix(in);
  m.projected_offset = get_optional(in);
  m.projected_rhs = get_optional(in);
  auto &t = m.timings;
  for (double *v : {&t.coarse_sweep, &t.fine_solves, &t.operator_samples, &t.enrichment, &t.basis,
                    &t.mixing, &t.projection, &t.total})
  {
    *v = get<double>(in);
  }
  return m;
}

void save_model(const std::filesystem::path &path, const ReducedModel &model)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw ConfigError(fmt::format("cannot write model file {}", path.string()));
  }
  write_model(out, model);
}

ReducedModel load_model(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ConfigError(fmt::format("cannot open model file {}", path.string()));
  }
  return read_model(in);
}

}  // namespace proxyrb
