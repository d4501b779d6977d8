// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hybridsync/config.hpp"
#include "hybridsync/simeng.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace hybridsync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConfig = 2;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct ChannelCheckOptions {
  double speed_kmh = 10.0;
  std::uint64_t seed = 1;
  int ks_samples_per_tap = 400;
  double ks_spacing_s = 0.25;
  double acf_record_s = 200.0;
  double acf_step_s = 0.25e-3;
  double acf_max_lag_s = 5e-3;
  double rel_tolerance = 0.01;
  double ks_alpha = 0.01;
  double acf_tolerance = 0.05;
};

struct ChannelReport {
  std::string name;
  double rms_delay_spread_ns = 0.0;
  double max_excess_delay_ns = 0.0;
  std::optional<double> expected_rms_ns;
  std::optional<double> expected_max_excess_ns;
  std::optional<double> ks_p_value;         // Rayleigh envelope, absent without fading
  std::optional<double> acf_max_abs_error;  // vs the model autocorrelation
  double doppler_hz = 0.0;
  bool rms_ok = true;
  bool max_excess_ok = true;
  bool ks_ok = true;
  bool acf_ok = true;
  bool passed() const { return rms_ok && max_excess_ok && ks_ok && acf_ok; }
};

/// Recomputes the delay statistics of `pdp`, then checks the fading process
/// envelope against Rayleigh (KS) and its empirical autocorrelation against
/// the Doppler model. Catalog channels are compared with the catalog values.
ChannelReport validate_channel(const chan::PowerDelayProfile& pdp,
                               std::optional<chan::FadingConfig> fading,
                               std::optional<double> expected_rms_ns,
                               std::optional<double> expected_max_excess_ns,
                               const ChannelCheckOptions& options = {});
config::json channel_report_json(const ChannelReport& report);

/// samples.csv body for an experiment result.
std::string samples_csv(const sim::ExperimentResult& result);
/// summary.json body (pretty printed, trailing newline).
std::string summary_json(const sim::ExperimentConfig& cfg, const sim::ExperimentResult& result);

/// Shortest round-trip decimal, '.' separator.
std::string format_number(double v);

}  // namespace hybridsync::cli
