// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "hybridsync/clockcore.hpp"

using namespace hybridsync;
using namespace hybridsync::clock;

namespace {

// Nearest grid point by enumeration; ties go to the lower point.
double brute_nearest(double x, double period, double phase) {
  const double base = std::floor(x / period) - 3.0;
  double best = 0.0, best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const double g = period * (base + k + phase);
    const double d = std::abs(g - x);
    if (d < best_d - 1e-9) {
      best = g;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("read_clock evaluates the affine model") {
  CHECK(read_clock({}, 12345.0) == 12345.0);
  CHECK(read_clock({50.0}, 1000.0) == 1050.0);
  ClockModel c;
  c.drift_ppm = 10.0;
  CHECK(read_clock(c, 1e9) == doctest::Approx(1e9 + 10000.0).epsilon(1e-15));
}

TEST_CASE("advance_drift") {
  RngStream rng(7);
  ClockModel c;
  c.drift_ppm = 3.0;
  CHECK(advance_drift(c, 5.0, rng).drift_ppm == 3.0);
  CHECK_THROWS(advance_drift(c, 0.0, rng));

  c.drift_walk_sigma_ppm_per_s = 0.2;
  RngStream a(9), b(9);
  CHECK(advance_drift(c, 1.0, a).drift_ppm == advance_drift(c, 1.0, b).drift_ppm);

  // Increment variance sigma^2 * dt.
  RngStream r(11);
  double sum2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double d = advance_drift(c, 4.0, r).drift_ppm - c.drift_ppm;
    sum2 += d * d;
  }
  CHECK(sum2 / n == doctest::Approx(0.2 * 0.2 * 4.0).epsilon(0.03));
}

TEST_CASE("quantize_timestamp matches the enumerated nearest grid point") {
  RngStream rng(1);
  for (double period : {8.0, 50.0, 6.25}) {
    for (int i = 0; i < 20000; ++i) {
      const double x = rng.uniform(-1e6, 1e6);
      const double phase = rng.uniform();
      const double q = quantize_timestamp(x, period, phase).value_ns;
      CHECK(q == doctest::Approx(brute_nearest(x, period, phase)).epsilon(1e-12));
      CHECK(q - x >= -period / 2 - 1e-9);
      CHECK(q - x < period / 2);
    }
  }
}

TEST_CASE("quantization ties round down") {
  CHECK(quantize_timestamp(4.0, 8.0, 0.0).value_ns == 0.0);
  CHECK(quantize_timestamp(12.0, 8.0, 0.0).value_ns == 8.0);
  CHECK(quantize_timestamp(4.0 + 1e-9, 8.0, 0.0).value_ns == 8.0);
  CHECK(quantize_timestamp(29.0, 50.0, 0.5).value_ns == 25.0);
  CHECK_THROWS(quantize_timestamp(1.0, 0.0, 0.0));
  CHECK_THROWS(quantize_timestamp(1.0, 8.0, 1.0));
}

TEST_CASE("port quantization flags") {
  CHECK(port_quantizes(PortKind::ethernet, Direction::egress));
  CHECK(port_quantizes(PortKind::ethernet, Direction::ingress));
  CHECK_FALSE(port_quantizes(PortKind::wireless, Direction::egress));
  CHECK(port_quantizes(PortKind::wireless, Direction::ingress));
}

TEST_CASE("grid_point rounding modes") {
  CHECK(grid_point(13.0, 8.0, 0.25, GridRounding::floor) == 10.0);
  CHECK(grid_point(13.0, 8.0, 0.25, GridRounding::ceil) == 18.0);
  CHECK(grid_point(10.0, 8.0, 0.25, GridRounding::ceil) == 10.0);
}

TEST_CASE("PhcState tracks the base oscillator and servo corrections") {
  ClockModel c;
  c.offset_ns = 100.0;
  c.drift_ppm = 5.0;
  PhcState phc(c, 1.0);
  const auto t1 = TrueTime::from_s(2.0);
  CHECK(phc.error_ns(t1) == doctest::Approx(100.0 + 2e9 * 5e-6));
  CHECK(phc.time_ns(t1) == doctest::Approx(read_clock(c, 2e9)));

  phc.step(t1, -40.0);
  CHECK(phc.error_ns(t1) == doctest::Approx(100.0 + 10000.0 - 40.0));
  CHECK(phc.base_error_ns(t1) == doctest::Approx(10100.0));
  phc.adjust_frequency(t1, -5.0);
  const auto t2 = TrueTime::from_s(7.0);
  CHECK(phc.error_ns(t2) == doctest::Approx(phc.error_ns(t1)));
  CHECK(phc.base_error_ns(t2) == doctest::Approx(100.0 + 7e9 * 5e-6));
  CHECK(phc.servo_offset_ns() == -40.0);
  CHECK(phc.servo_freq_ppm() == -5.0);

  PhcState coarse(c, 8.0);
  const double r = coarse.read_ns(t1);
  CHECK(std::fmod(r, 8.0) == 0.0);
  CHECK(std::abs(r - coarse.time_ns(t1)) <= 4.0);
}

TEST_CASE("crossing_time inverts the PHC timeline") {
  RngStream rng(3);
  for (int i = 0; i < 200; ++i) {
    ClockModel c;
    c.offset_ns = rng.uniform(-1e4, 1e4);
    c.drift_ppm = rng.uniform(-50, 50);
    PhcState phc(c);
    const double v = rng.uniform(1e9, 1e12);
    const TrueTime t = phc.crossing_time(v);
    CHECK(std::abs(phc.time_ns(t) - v) <= 1e-3);  // picosecond time grid
  }
}

TEST_CASE("sample_instant lands on the base oscillator grid") {
  RngStream rng(5);
  for (int i = 0; i < 500; ++i) {
    ClockModel c;
    c.offset_ns = rng.uniform(-1e5, 1e5);
    c.drift_ppm = rng.uniform(-20, 20);
    PhcState phc(c);
    const double phase = rng.uniform();
    const TrueTime t = TrueTime::from_ns(rng.uniform(0, 1e10));
    const TrueTime s = phc.sample_instant(t, 8.0, phase, GridRounding::nearest);
    const double local = s.ns() + phc.base_error_ns(s);
    const double u = local / 8.0 - phase;
    CHECK(std::abs(u - std::round(u)) < 1e-3);  // ps time resolution
    CHECK(std::abs((s - t).ns()) <= 4.0 + 1e-3);
  }
}

TEST_CASE("servo_update: jam, PI action and anti-windup") {
  ServoState s;
  auto first = servo_update(s, 500.0, 1.0);
  CHECK(first.offset_step_ns == 500.0);
  CHECK(first.freq_step_ppm == 0.0);
  CHECK(s.locked);

  auto step = servo_update(s, 10.0, 1.0);
  CHECK(step.offset_step_ns == doctest::Approx(7.0));
  CHECK(step.freq_step_ppm == doctest::Approx(0.3 * 10.0 / 1000.0));

  ServoState w;
  w.locked = true;
  w.anti_windup_ppm = 1.0;
  servo_update(w, 1e9, 1.0);
  CHECK(w.integrator_ppm == 1.0);
  servo_update(w, -1e12, 1.0);
  CHECK(w.integrator_ppm == -1.0);

  CHECK_THROWS_AS(servo_update(s, std::nan(""), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(servo_update(s, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("closed loop removes a constant +10 ppm drift") {
  ClockModel c;
  c.drift_ppm = 10.0;
  c.offset_ns = 2500.0;
  PhcState slave(c);
  ServoState servo;
  double est = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const auto t = TrueTime::from_s(k);
    est = slave.error_ns(t);  // noiseless two-way estimate
    apply_servo_step(slave, t, servo_update(servo, est, 1.0));
  }
  CHECK(std::abs(est) < 1e-3);
  CHECK(slave.servo_freq_ppm() == doctest::Approx(-10.0).epsilon(1e-4));
}
