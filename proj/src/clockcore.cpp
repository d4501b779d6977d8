// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/clockcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridsync::clock {

void ClockModel::validate() const {
  if (!(sample_period_ns > 0.0)) throw std::invalid_argument("sample_period_ns must be > 0");
  if (!(phase >= 0.0 && phase < 1.0)) throw std::invalid_argument("phase must lie in [0, 1)");
  if (!(drift_walk_sigma_ppm_per_s >= 0.0))
    throw std::invalid_argument("drift_walk_sigma_ppm_per_s must be >= 0");
}

double read_clock(const ClockModel& clock, double true_time_ns) {
  return true_time_ns * (1.0 + clock.drift_ppm * 1e-6) + clock.offset_ns;
}

ClockModel advance_drift(const ClockModel& clock, double dt_s, RngStream& rng) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be > 0");
  ClockModel next = clock;
  if (clock.drift_walk_sigma_ppm_per_s > 0.0)
    next.drift_ppm += clock.drift_walk_sigma_ppm_per_s * std::sqrt(dt_s) * rng.normal();
  return next;
}

double grid_point(double x, double period, double phase, GridRounding rounding) {
  const double u = x / period - phase;
  double n = 0.0;
  switch (rounding) {
    case GridRounding::nearest: n = std::ceil(u - 0.5); break;
    case GridRounding::floor: n = std::floor(u); break;
    case GridRounding::ceil: n = std::ceil(u); break;
  }
  return period * (n + phase);
}

Timestamp quantize_timestamp(double clock_time_ns, double sample_period_ns, double phase,
                             Direction direction) {
  if (!(sample_period_ns > 0.0)) throw std::invalid_argument("sample_period_ns must be > 0");
  if (!(phase >= 0.0 && phase < 1.0)) throw std::invalid_argument("phase must lie in [0, 1)");
  return {grid_point(clock_time_ns, sample_period_ns, phase, GridRounding::nearest), direction};
}

PhcState::PhcState(const ClockModel& base, double resolution_ns, TrueTime start)
    : base_(base), resolution_ns_(resolution_ns), anchor_(start) {
  base_.validate();
  if (!(resolution_ns > 0.0)) throw std::invalid_argument("resolution_ns must be > 0");
  base_error_at_anchor_ = read_clock(base_, start.ns()) - start.ns();
  phc_error_at_anchor_ = base_error_at_anchor_;
}

double PhcState::error_ns(TrueTime t) const {
  return phc_error_at_anchor_ + (t - anchor_).ns() * rate_ppm() * 1e-6;
}

double PhcState::base_error_ns(TrueTime t) const {
  return base_error_at_anchor_ + (t - anchor_).ns() * base_.drift_ppm * 1e-6;
}

double PhcState::read_ns(TrueTime t) const {
  return std::round(time_ns(t) / resolution_ns_) * resolution_ns_;
}

TrueTime PhcState::sample_instant(TrueTime t, double period_ns, double phase,
                                  GridRounding rounding) const {
  const double local = t.ns() + base_error_ns(t);
  const double delta_local = grid_point(local, period_ns, phase, rounding) - local;
  const double delta_true = delta_local / (1.0 + base_.drift_ppm * 1e-6);
  return t + TrueTime::from_ns(delta_true);
}

TrueTime PhcState::crossing_time(double value_ns) const {
  const double r = rate_ppm() * 1e-6;
  const double dt = (value_ns - anchor_.ns() - phc_error_at_anchor_) / (1.0 + r);
  return anchor_ + TrueTime::from_ns(dt);
}

void PhcState::rebase(TrueTime t) {
  base_error_at_anchor_ = base_error_ns(t);
  phc_error_at_anchor_ = error_ns(t);
  anchor_ = t;
}

void PhcState::step(TrueTime t, double offset_ns) {
  rebase(t);
  phc_error_at_anchor_ += offset_ns;
  servo_offset_ns_ += offset_ns;
}

void PhcState::adjust_frequency(TrueTime t, double delta_ppm) {
  rebase(t);
  servo_freq_ppm_ += delta_ppm;
}

void PhcState::set_drift(TrueTime t, double drift_ppm) {
  rebase(t);
  base_.drift_ppm = drift_ppm;
}

ServoStep servo_update(ServoState& servo, double estimated_offset_ns, double interval_s) {
  if (!std::isfinite(estimated_offset_ns))
    throw std::invalid_argument("servo_update: non-finite offset estimate");
  if (!(interval_s > 0.0)) throw std::invalid_argument("servo_update: interval_s must be > 0");

  if (!servo.locked) {
    servo.locked = true;
    return {estimated_offset_ns, 0.0};
  }
  // ki * offset is the share of the error the frequency term removes over
  // one interval; 1 ppm over interval_s seconds is interval_s * 1e3 ns.
  const double before = servo.integrator_ppm;
  const double target = before + servo.ki * estimated_offset_ns / (interval_s * 1e3);
  servo.integrator_ppm = std::clamp(target, -servo.anti_windup_ppm, servo.anti_windup_ppm);
  return {servo.kp * estimated_offset_ns, servo.integrator_ppm - before};
}

void apply_servo_step(PhcState& phc, TrueTime t, const ServoStep& step) {
  if (step.offset_step_ns != 0.0) phc.step(t, -step.offset_step_ns);
  if (step.freq_step_ppm != 0.0) phc.adjust_frequency(t, -step.freq_step_ppm);
}

}  // namespace hybridsync::clock
