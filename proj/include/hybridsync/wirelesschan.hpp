// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// Multipath wireless link model: power delay profiles, time-correlated tap
// fading, the preamble detector's arrival decision and propagation delay.

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsync/units.hpp"

namespace hybridsync::chan {

struct Tap {
  double delay_ns = 0.0;
  double power_db = 0.0;
};

struct PowerDelayProfile {
  std::string name;
  std::vector<Tap> taps;
  double rms_delay_spread_ns = 0.0;
  double max_excess_delay_ns = 0.0;

  double total_linear_power() const;
};

/// Exponentially decaying profile on a uniform grid that spans exactly
/// max_excess_ns. Without an explicit spacing, the catalog rule is used:
/// at most 10 taps, no closer than 25 ns.
struct SyntheticPdp {
  double rms_delay_spread_ns = 0.0;
  double max_excess_ns = 0.0;
  std::optional<double> tap_spacing_ns;
};

inline constexpr double kDefaultTapSpacingNs = 25.0;
inline constexpr std::size_t kMaxCatalogTaps = 10;

/// Catalog names: AWGN, WLAN_A, WLAN_C, IWLAN_A, IWLAN_B. Throws ConfigError
/// for unknown names or an infeasible (rms, span, spacing) combination.
PowerDelayProfile build_pdp(std::string_view name);
PowerDelayProfile build_pdp(const SyntheticPdp& spec, std::string name = "synthetic");
/// Profile from explicit taps; delays must start at 0 and strictly increase.
PowerDelayProfile make_pdp(std::string name, std::vector<Tap> taps);

const std::vector<std::string>& catalog_names();

/// Published (rms delay spread, max excess delay) of a catalog channel.
struct CatalogTargets {
  double rms_delay_spread_ns = 0.0;
  double max_excess_delay_ns = 0.0;
};
std::optional<CatalogTargets> catalog_targets(std::string_view name);
/// Canonical catalog name for loose spellings ("iwlanB", "wlan-c"), if any.
std::optional<std::string> canonical_channel_name(std::string_view name);

double rms_delay_spread(const PowerDelayProfile& pdp);
double rms_delay_spread(const std::vector<Tap>& taps);

enum class FadingDistribution { rayleigh, rice };
enum class DopplerSpectrum { jakes, bell, gaussian };

struct FadingConfig {
  FadingDistribution distribution = FadingDistribution::rayleigh;
  double rice_k_db = 0.0;
  double doppler_hz = 0.0;  // 0 = static channel
  DopplerSpectrum spectrum = DopplerSpectrum::jakes;
  double carrier_hz = 2.4e9;

  void validate() const;
};

/// Maximum Doppler shift f_d = v * f_c / c.
double doppler_from_speed(double speed_kmh, double carrier_hz = 2.4e9);

/// 0.423 / f_d in seconds; nullopt for a static channel (infinite T_c).
std::optional<double> coherence_time(const FadingConfig& fading);

/// J0(2 pi f_d tau).
double jakes_autocorrelation(double doppler_hz, double lag_s);

struct ChannelRealization {
  std::vector<std::complex<double>> tap_gains;
  TrueTime realized_at;
};

/// Per-tap complex Gaussian processes with the configured Doppler spectrum,
/// generated by spectral shaping: blocks of white Gaussian noise are weighted
/// by the square root of the discretised Doppler spectrum and transformed to
/// the time domain on a grid 16x oversampled against f_d. Queries between
/// grid points use 4-point Lagrange interpolation. Blocks are produced lazily
/// from (seed, tap, block index), so results do not depend on query order.
class FadingProcess {
 public:
  FadingProcess(PowerDelayProfile pdp, FadingConfig fading, std::uint64_t seed);
  ~FadingProcess();
  FadingProcess(FadingProcess&&) noexcept;
  FadingProcess& operator=(FadingProcess&&) noexcept;

  ChannelRealization realize(TrueTime t);
  /// Unit-mean-power gain of one tap, before PDP weighting.
  std::complex<double> unit_gain(std::size_t tap, TrueTime t);

  const PowerDelayProfile& pdp() const;
  const FadingConfig& fading() const;
  /// Autocorrelation of the unit gain process actually synthesised.
  double model_autocorrelation(double lag_s) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ChannelRealization realize_channel(FadingProcess& process, TrueTime t);

struct DetectorPolicy {
  enum class Kind { strongest_tap, first_above_threshold };
  Kind kind = Kind::strongest_tap;
  double threshold_db = 6.0;
};

/// Excess delay (relative to the first tap) of the replica the preamble
/// detector locks onto. Always within [0, max_excess_delay_ns].
double detect_arrival(const ChannelRealization& realization, const PowerDelayProfile& pdp,
                      const DetectorPolicy& policy = {});

struct LinkGeometry {
  double distance_m = 0.0;
  double base_delay_ns = 0.0;  // fixed equipment delay
};

double propagation_delay(const LinkGeometry& geom);

}  // namespace hybridsync::chan
