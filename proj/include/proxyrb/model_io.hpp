// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_MODEL_IO_HPP
#define PROXYRB_MODEL_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "proxyrb/offline.hpp"

namespace proxyrb
{

// Binary container: 8-byte magic "PRXRBM01", u32 version, then every field of ReducedModel
// in declaration order. Integers are little-endian u32/u64/i64, reals little-endian IEEE-754
// doubles, matrices are (i64 rows, i64 cols, column-major entries), optional blocks carry a
// u8 presence flag.
inline constexpr std::uint32_t kModelVersion = 1;

void write_model(std::ostream &out, const ReducedModel &model);
ReducedModel read_model(std::istream &in);

void save_model(const std::filesystem::path &path, const ReducedModel &model);
ReducedModel load_model(const std::filesystem::path &path);

}  // namespace proxyrb

#endif  // PROXYRB_MODEL_IO_HPP
