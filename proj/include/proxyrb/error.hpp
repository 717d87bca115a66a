// SPDX-License-Identifier: Apache-2.0

#ifndef PROXYRB_ERROR_HPP
#define PROXYRB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace proxyrb
{

// Bad input: dimensions, ranges, configuration. Maps to exit code 1 in the CLI.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Failure inside a computation (degenerate matrix, singular solve). Exit code 2.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace proxyrb

#endif  // PROXYRB_ERROR_HPP
