// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <cmath>

#include "doctest.h"
#include "hybridsync/error.hpp"
#include "hybridsync/syncproto.hpp"

using namespace hybridsync;
using namespace hybridsync::proto;

namespace {

// Ideal master at true time t; slave clock = true + offset. Forward delay
// d + delta, reverse delay d.
SyncSample synthetic(double offset, double d, double delta, Scheme scheme) {
  const double t1 = 1000.0;
  SyncSample s;
  s.scheme = scheme;
  s.t1_ns = t1;
  s.t2_ns = t1 + d + delta + offset;
  if (scheme != Scheme::one_way) {
    const double t3_true = t1 + d + delta + 5000.0;
    s.t3_ns = t3_true + offset;
    s.t4_ns = t3_true + d;
  }
  return s;
}

}  // namespace

TEST_CASE("two-way bias is half the forward-only delay") {
  for (double delta : {0.0, 10.0, 390.0, 1050.0}) {
    const auto s = synthetic(37.5, 1135.0, delta, Scheme::two_way);
    CHECK(estimate_offset(s, {}) - 37.5 == doctest::Approx(delta / 2.0));
    CHECK(estimate_path_delay(s) == doctest::Approx(1135.0 + delta / 2.0));
  }
}

TEST_CASE("two-way is exact on symmetric links") {
  for (double off : {-1e6, -3.0, 0.0, 12.25, 4e5}) {
    const auto s = synthetic(off, 500.0, 0.0, Scheme::two_way);
    CHECK(estimate_offset(s, {}) == doctest::Approx(off).epsilon(1e-15));
  }
}

TEST_CASE("one-way bias is delta plus the uncalibrated delay") {
  ProtocolConfig p = wsharp_beacon_preset();
  for (double t_ms : {0.0, 33.4, 100.0}) {
    p.calibrated_delay_ns = 1135.0;
    const auto s = synthetic(-8.0, 1135.0 + t_ms, 140.0, Scheme::one_way);
    CHECK(estimate_offset(s, p) + 8.0 == doctest::Approx(140.0 + t_ms));
  }
  CHECK_THROWS_AS(estimate_path_delay(synthetic(0, 1, 0, Scheme::one_way)), UnsupportedScheme);
}

TEST_CASE("estimators reject non-finite timestamps") {
  auto s = synthetic(0.0, 10.0, 0.0, Scheme::two_way);
  s.t4_ns = std::nan("");
  CHECK_THROWS_AS(estimate_offset(s, {}), std::invalid_argument);
}

TEST_CASE("presets and scheme names") {
  CHECK(wired_ptp_preset().sync_period_s == 1.0);
  CHECK(wifi_ptp_preset().sync_period_s == 0.125);
  const auto w = wsharp_beacon_preset();
  CHECK(w.sync_period_s == 500e-6);
  CHECK(w.scheme == Scheme::one_way);
  CHECK(w.kp == 0.1);
  CHECK(w.ki == 0.01);
  for (auto s : {Scheme::two_way, Scheme::one_way, Scheme::ftm_burst})
    CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("three_way"), ConfigError);
  ProtocolConfig bad;
  bad.burst_length = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("exchanges through quantizing ports") {
  clock::ClockModel m, s;
  s.offset_ns = 250.0;
  clock::PhcState master(m, 1e-3), slave(s, 1e-3);
  const Endpoint me{&master, {1e-3, 0.0}, nullptr};
  const Endpoint se{&slave, {1e-3, 0.0}, nullptr};
  Link fwd = Link::ethernet({2.0, 0.0}), rev = Link::ethernet({2.0, 0.0});
  const auto t = TrueTime::from_s(1.0);

  auto r = two_way_exchange(me, se, fwd, rev, t);
  CHECK(estimate_offset(r.sample, {}) == doctest::Approx(250.0).epsilon(1e-5));
  CHECK(r.completed_at > t);

  fwd.extra_delay_ns = 60.0;
  r = two_way_exchange(me, se, fwd, rev, t);
  CHECK(estimate_offset(r.sample, {}) == doctest::Approx(280.0).epsilon(1e-5));

  ProtocolConfig one;
  one.scheme = Scheme::one_way;
  one.calibrated_delay_ns = chan::propagation_delay({2.0, 0.0});
  r = run_exchange(me, se, fwd, rev, t, one);
  CHECK(estimate_offset(r.sample, one) == doctest::Approx(310.0).epsilon(1e-5));
  CHECK_FALSE(r.sample.t3_ns);
}

TEST_CASE("wireless ports only quantize ingress") {
  clock::ClockModel c;
  c.offset_ns = 3.3;
  clock::PhcState phc(c, 1e-3);
  const Endpoint ep{&phc, {50.0, 0.37}, nullptr};
  const auto t = TrueTime::from_ns(123456.789);
  const double tx = port_timestamp(ep, t, clock::Direction::egress, clock::PortKind::wireless);
  const double rx = port_timestamp(ep, t, clock::Direction::ingress, clock::PortKind::wireless);
  CHECK(tx == doctest::Approx(phc.read_ns(t)).epsilon(1e-12));
  const double u = (rx) / 50.0 - 0.37;
  CHECK(std::abs(u - std::round(u)) < 1e-4);
  CHECK(std::abs(rx - phc.time_ns(t)) <= 25.0);
}

TEST_CASE("FTM bursts average the exchanges") {
  clock::ClockModel m, s;
  s.offset_ns = -40.0;
  clock::PhcState master(m), slave(s);
  const Endpoint me{&master, {50.0, 0.1}, nullptr};
  const Endpoint se{&slave, {50.0, 0.6}, nullptr};
  const auto pdp = chan::build_pdp("WLAN_A");
  chan::FadingConfig f;
  f.doppler_hz = 60.0;
  Link fwd = Link::wireless({0.0, 1135.0}, chan::FadingProcess(pdp, f, 1));
  Link rev = Link::wireless({0.0, 1135.0}, chan::FadingProcess(pdp, f, 2));
  Link fwd2 = Link::wireless({0.0, 1135.0}, chan::FadingProcess(pdp, f, 1));
  Link rev2 = Link::wireless({0.0, 1135.0}, chan::FadingProcess(pdp, f, 2));

  const auto t = TrueTime::from_s(2.0);
  ProtocolConfig cfg;
  const auto one = ftm_burst(me, se, fwd, rev, 1, t, cfg);
  const auto ref = two_way_exchange(me, se, fwd2, rev2, t, cfg);
  CHECK(one.sample.scheme == Scheme::ftm_burst);
  CHECK(estimate_offset(one.sample, cfg) == estimate_offset(ref.sample, cfg));

  // Mean of the per-exchange estimates equals the estimate of the means.
  double sum = 0.0;
  for (int k = 0; k < 8; ++k)
    sum += estimate_offset(two_way_exchange(me, se, fwd2, rev2, t + TrueTime::from_s(1e-3 * k), cfg).sample, cfg);
  const auto burst = ftm_burst(me, se, fwd, rev, 8, t, cfg);
  CHECK(estimate_offset(burst.sample, cfg) == doctest::Approx(sum / 8.0).epsilon(1e-9));

  // Variance reduction over many bursts.
  double v1 = 0.0, v8 = 0.0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const auto at = TrueTime::from_s(10.0 + 0.5 * i);
    const double e1 = estimate_offset(ftm_burst(me, se, fwd, rev, 1, at, cfg).sample, cfg) + 40.0;
    const double e8 = estimate_offset(ftm_burst(me, se, fwd, rev, 8, at, cfg).sample, cfg) + 40.0;
    v1 += e1 * e1;
    v8 += e8 * e8;
  }
  CHECK(v8 < v1);
}
