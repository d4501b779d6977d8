// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <stdexcept>
#include <string>

namespace hybridsync {

/// Bad input configuration: malformed files, unknown keys, infeasible
/// parameters. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed result failed a tolerance check. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hybridsync
