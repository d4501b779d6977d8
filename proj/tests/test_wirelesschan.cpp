// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <cmath>
#include <complex>

#include "doctest.h"
#include "hybridsync/error.hpp"
#include "hybridsync/wirelesschan.hpp"

using namespace hybridsync;
using namespace hybridsync::chan;

namespace {

// Independent second-moment computation straight from the tap list.
double oracle_rms(const PowerDelayProfile& pdp) {
  double p = 0, m1 = 0, m2 = 0;
  for (const auto& t : pdp.taps) {
    const double w = std::pow(10.0, t.power_db / 10.0);
    p += w;
    m1 += w * t.delay_ns;
    m2 += w * t.delay_ns * t.delay_ns;
  }
  return std::sqrt(m2 / p - (m1 / p) * (m1 / p));
}

}  // namespace

TEST_CASE("catalog profiles reproduce the published delay statistics") {
  struct Row {
    const char* name;
    double rms, span;
  };
  for (const Row& r : {Row{"WLAN_A", 50, 390}, Row{"WLAN_C", 150, 1050}, Row{"IWLAN_A", 29, 140},
                       Row{"IWLAN_B", 89, 600}}) {
    CAPTURE(r.name);
    const auto pdp = build_pdp(r.name);
    CHECK(oracle_rms(pdp) == doctest::Approx(r.rms).epsilon(0.01));
    CHECK(pdp.max_excess_delay_ns == doctest::Approx(r.span).epsilon(0.01));
    CHECK(pdp.taps.size() <= kMaxCatalogTaps);
    CHECK(pdp.taps.front().delay_ns == 0.0);
    for (std::size_t k = 1; k < pdp.taps.size(); ++k) {
      CHECK(pdp.taps[k].delay_ns - pdp.taps[k - 1].delay_ns >= kDefaultTapSpacingNs - 1e-9);
      CHECK(pdp.taps[k].power_db < pdp.taps[k - 1].power_db);
    }
    const auto targets = catalog_targets(r.name);
    REQUIRE(targets);
    CHECK(targets->rms_delay_spread_ns == r.rms);
  }
  const auto awgn = build_pdp("AWGN");
  CHECK(awgn.taps.size() == 1);
  CHECK(rms_delay_spread(awgn) == 0.0);
  CHECK(awgn.max_excess_delay_ns == 0.0);
}

TEST_CASE("channel names") {
  CHECK(canonical_channel_name("iwlanB") == "IWLAN_B");
  CHECK(canonical_channel_name("wlan-c") == "WLAN_C");
  CHECK(canonical_channel_name("awgn") == "AWGN");
  CHECK_FALSE(canonical_channel_name("WLAN_Z"));
  CHECK_THROWS_AS(build_pdp("WLAN_Z"), ConfigError);
  CHECK(catalog_names().size() == 5);
}

TEST_CASE("synthetic and user profiles") {
  const auto p = build_pdp(SyntheticPdp{40.0, 300.0, 25.0});
  CHECK(p.taps.size() == 13);
  CHECK(oracle_rms(p) == doctest::Approx(40.0).epsilon(1e-6));
  CHECK_THROWS_AS(build_pdp(SyntheticPdp{40.0, 310.0, 25.0}), ConfigError);
  CHECK_THROWS_AS(build_pdp(SyntheticPdp{200.0, 300.0, std::nullopt}), ConfigError);

  CHECK_THROWS_AS(make_pdp("x", {}), ConfigError);
  CHECK_THROWS_AS(make_pdp("x", {{5.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(make_pdp("x", {{0.0, 0.0}, {0.0, -3.0}}), ConfigError);
  const auto two = make_pdp("two", {{0.0, 0.0}, {100.0, 0.0}});
  CHECK(two.rms_delay_spread_ns == doctest::Approx(50.0));
  CHECK(two.total_linear_power() == doctest::Approx(2.0));
}

TEST_CASE("Doppler and coherence time") {
  CHECK(doppler_from_speed(10.0) == doctest::Approx(22.24).epsilon(1e-3));
  CHECK(doppler_from_speed(30.0) == doctest::Approx(66.71).epsilon(1e-3));
  FadingConfig f;
  CHECK_FALSE(coherence_time(f));
  f.doppler_hz = 20.0;
  const double tc = *coherence_time(f);
  CHECK(tc == doctest::Approx(0.423 / 20.0));
  f.doppler_hz = 40.0;
  CHECK(*coherence_time(f) == doctest::Approx(tc / 2.0));
  CHECK(jakes_autocorrelation(22.0, 0.0) == 1.0);
  // First zero of J0 at 2.4048.
  CHECK(jakes_autocorrelation(1.0, 2.404825557695773 / (2 * M_PI)) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fading process statistics and reproducibility") {
  const auto pdp = build_pdp("IWLAN_B");
  FadingConfig f;
  f.doppler_hz = 22.0;
  FadingProcess a(pdp, f, 99), b(pdp, f, 99), c(pdp, f, 100);

  // Query-order independence.
  const auto t1 = TrueTime::from_s(3.25), t2 = TrueTime::from_s(812.5);
  const auto a2 = a.unit_gain(3, t2);
  const auto a1 = a.unit_gain(3, t1);
  CHECK(b.unit_gain(3, t1) == a1);
  CHECK(b.unit_gain(3, t2) == a2);
  CHECK(c.unit_gain(3, t1) != a1);

  // Unit mean power per tap from well separated samples.
  double p = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) p += std::norm(a.unit_gain(0, TrueTime::from_s(0.3 * i)));
  CHECK(p / n == doctest::Approx(1.0).epsilon(0.08));

  // The synthesized spectrum follows J0 closely.
  for (double lag = 0.0; lag <= 5e-3; lag += 0.5e-3)
    CHECK(std::abs(a.model_autocorrelation(lag) - jakes_autocorrelation(22.0, lag)) < 0.01);

  const auto r = a.realize(t1);
  CHECK(r.tap_gains.size() == pdp.taps.size());
  CHECK(std::abs(r.tap_gains[3]) ==
        doctest::Approx(std::abs(a1) * std::pow(10.0, pdp.taps[3].power_db / 20.0)));
}

TEST_CASE("static channels are frozen for the whole run") {
  const auto pdp = build_pdp("WLAN_A");
  FadingProcess s(pdp, FadingConfig{}, 5);
  CHECK(s.unit_gain(2, TrueTime::from_s(1.0)) == s.unit_gain(2, TrueTime::from_s(900.0)));
  CHECK(s.model_autocorrelation(1.0) == 1.0);
}

TEST_CASE("Rice tap carries the line-of-sight share") {
  const auto pdp = build_pdp("IWLAN_A");
  FadingConfig f;
  f.distribution = FadingDistribution::rice;
  f.rice_k_db = 6.0;
  f.doppler_hz = 30.0;
  FadingProcess proc(pdp, f, 3);
  std::complex<double> mean{0.0, 0.0};
  double power = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto g = proc.unit_gain(0, TrueTime::from_s(0.2 * i));
    mean += g;
    power += std::norm(g);
  }
  mean /= static_cast<double>(n);
  const double k = std::pow(10.0, 0.6);
  CHECK(std::norm(mean) == doctest::Approx(k / (k + 1.0)).epsilon(0.05));
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.06));
}

TEST_CASE("detector policies") {
  const auto pdp = make_pdp("p", {{0.0, 0.0}, {50.0, -1.0}, {100.0, -2.0}});
  ChannelRealization r;
  r.tap_gains = {{0.6, 0.0}, {1.0, 0.0}, {0.2, 0.0}};
  CHECK(detect_arrival(r, pdp) == 50.0);
  DetectorPolicy first{DetectorPolicy::Kind::first_above_threshold, 6.0};
  CHECK(detect_arrival(r, pdp, first) == 0.0);  // 0.36 >= 10^-0.6
  first.threshold_db = 3.0;
  CHECK(detect_arrival(r, pdp, first) == 50.0);  // 0.36 < 10^-0.3
  r.tap_gains.pop_back();
  CHECK_THROWS(detect_arrival(r, pdp));
}

TEST_CASE("detected excess stays within the profile span") {
  const auto pdp = build_pdp("WLAN_C");
  FadingConfig f;
  f.doppler_hz = 60.0;
  FadingProcess proc(pdp, f, 17);
  for (int i = 0; i < 2000; ++i) {
    const double d = detect_arrival(proc.realize(TrueTime::from_s(0.01 * i)), pdp);
    CHECK(d >= 0.0);
    CHECK(d <= pdp.max_excess_delay_ns);
  }
}

TEST_CASE("propagation delay") {
  CHECK(propagation_delay({10.0, 0.0}) == doctest::Approx(33.3564).epsilon(1e-5));
  CHECK(propagation_delay({0.0, 1135.0}) == 1135.0);
  CHECK_THROWS(propagation_delay({-1.0, 0.0}));
}
