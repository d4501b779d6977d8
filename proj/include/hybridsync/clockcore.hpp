// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// Free-running oscillators, the disciplined PTP hardware clock (PHC),
// hardware timestamp quantization and the PI servo.

#pragma once

#include "hybridsync/rng.hpp"
#include "hybridsync/units.hpp"

namespace hybridsync::clock {

/// Free-running oscillator: C(t) = t * (1 + drift) + offset, sampled on the
/// grid T_s * (n + phase) of its own local time.
struct ClockModel {
  double offset_ns = 0.0;
  double drift_ppm = 0.0;
  double phase = 0.0;  // cycles, [0, 1)
  double sample_period_ns = 8.0;
  double drift_walk_sigma_ppm_per_s = 0.0;

  void validate() const;
};

double read_clock(const ClockModel& clock, double true_time_ns);

/// Random-walk step of the oscillator drift. Returns the updated model.
ClockModel advance_drift(const ClockModel& clock, double dt_s, RngStream& rng);

enum class Direction { egress, ingress };
enum class PortKind { ethernet, wireless };

/// Ethernet PHYs quantize both directions; the wireless transceivers only
/// quantize receive timestamps.
constexpr bool port_quantizes(PortKind kind, Direction dir) {
  return kind == PortKind::ethernet || dir == Direction::ingress;
}

struct Timestamp {
  double value_ns = 0.0;
  Direction direction = Direction::ingress;
};

enum class GridRounding { nearest, floor, ceil };

/// Point of the grid period * (n + phase) selected from x by `rounding`.
/// Nearest rounding breaks ties downwards so that the error
/// (grid - x) lies in [-period/2, period/2).
double grid_point(double x, double period, double phase, GridRounding rounding);

Timestamp quantize_timestamp(double clock_time_ns, double sample_period_ns, double phase,
                             Direction direction = Direction::ingress);

/// PTP hardware clock: a free-running base oscillator plus accumulated servo
/// phase and frequency corrections, reported at `resolution_ns`.
///
/// Internally the clock is kept as its error against true time, linear
/// between anchors. Every correction re-anchors at the instant it is applied.
class PhcState {
 public:
  explicit PhcState(const ClockModel& base = {}, double resolution_ns = 1.0,
                    TrueTime start = {});

  const ClockModel& base_clock() const { return base_; }
  double servo_offset_ns() const { return servo_offset_ns_; }
  double servo_freq_ppm() const { return servo_freq_ppm_; }
  double resolution_ns() const { return resolution_ns_; }

  /// Continuous PHC time minus true time, in ns.
  double error_ns(TrueTime t) const;
  /// Base oscillator local time minus true time, in ns.
  double base_error_ns(TrueTime t) const;
  /// Continuous (unrounded) PHC time.
  double time_ns(TrueTime t) const { return t.ns() + error_ns(t); }
  /// Reported PHC time, rounded to the counter resolution.
  double read_ns(TrueTime t) const;

  /// Sampling instant of the base oscillator grid (period, phase) chosen
  /// relative to true time t.
  TrueTime sample_instant(TrueTime t, double period_ns, double phase,
                          GridRounding rounding) const;

  /// True time at which the continuous PHC reaches `value_ns`, assuming no
  /// further corrections.
  TrueTime crossing_time(double value_ns) const;

  void step(TrueTime t, double offset_ns);
  void adjust_frequency(TrueTime t, double delta_ppm);
  void set_drift(TrueTime t, double drift_ppm);

 private:
  void rebase(TrueTime t);
  double rate_ppm() const { return base_.drift_ppm + servo_freq_ppm_; }

  ClockModel base_;
  double resolution_ns_;
  double servo_offset_ns_ = 0.0;
  double servo_freq_ppm_ = 0.0;
  TrueTime anchor_;
  double base_error_at_anchor_ = 0.0;
  double phc_error_at_anchor_ = 0.0;
};

struct ServoState {
  double kp = 0.7;
  double ki = 0.3;
  double integrator_ppm = 0.0;
  bool locked = false;
  double anti_windup_ppm = 100.0;
};

/// Corrections to subtract from the slave clock.
struct ServoStep {
  double offset_step_ns = 0.0;
  double freq_step_ppm = 0.0;
};

/// PI filter on the estimated offset. The first call jams the clock with the
/// full estimate; later calls apply kp * offset as a phase step and move the
/// frequency integrator by ki * offset spread over one update interval.
/// Throws std::invalid_argument on a non-finite estimate or interval <= 0.
ServoStep servo_update(ServoState& servo, double estimated_offset_ns, double interval_s);

void apply_servo_step(PhcState& phc, TrueTime t, const ServoStep& step);

}  // namespace hybridsync::clock
