// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace hybridsync {

/// Simulation ("true") time, held as integer picoseconds so that sub-sample
/// phases and long runs stay exact and bit-reproducible. Used for both
/// instants and durations.
class TrueTime {
 public:
  constexpr TrueTime() = default;

  static constexpr TrueTime from_ps(std::int64_t ps) { return TrueTime(ps); }
  static TrueTime from_ns(double ns) { return TrueTime(std::llround(ns * 1e3)); }
  static TrueTime from_s(double s) { return TrueTime(std::llround(s * 1e12)); }

  constexpr std::int64_t ps() const { return ps_; }
  constexpr double ns() const { return static_cast<double>(ps_) * 1e-3; }
  constexpr double s() const { return static_cast<double>(ps_) * 1e-12; }

  constexpr auto operator<=>(const TrueTime&) const = default;

  constexpr TrueTime& operator+=(TrueTime o) { ps_ += o.ps_; return *this; }
  constexpr TrueTime& operator-=(TrueTime o) { ps_ -= o.ps_; return *this; }
  friend constexpr TrueTime operator+(TrueTime a, TrueTime b) { return a += b; }
  friend constexpr TrueTime operator-(TrueTime a, TrueTime b) { return a -= b; }

 private:
  constexpr explicit TrueTime(std::int64_t ps) : ps_(ps) {}
  std::int64_t ps_ = 0;
};

/// Speed of light in metres per nanosecond.
inline constexpr double kSpeedOfLightMPerNs = 0.299792458;

}  // namespace hybridsync
