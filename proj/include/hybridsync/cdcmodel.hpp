// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include "hybridsync/clockcore.hpp"
#include "hybridsync/units.hpp"

namespace hybridsync::cdc {

/// PHC translation between two asynchronous clock domains. The destination
/// reads the most recent source counter value and adds T_src / 2 so that the
/// translation error is centred on zero.
struct CdcConfig {
  double t_src_ns = 32.0;
  double t_dst_ns = 6.25;
  double rho_dst_ppm = 0.0;
  double dst_phase = 0.0;  // cycles, [0, 1)
  /// Synchronizer pipeline latency; constant, so assumed calibrated away.
  double latency_ns = 0.0;

  /// Throws ConfigError unless both periods are positive and
  /// t_src >= 4 * t_dst (two-flop synchronizer feasibility).
  void validate() const;
};

struct Translation {
  double dst_read_ns = 0.0;
  double delta_phc_ns = 0.0;  // dst_read - source time at the sampling instant
};

/// Destination sample `dst_sample_index` of a source timeline that reads
/// `src_time_ns` at destination sample 0.
Translation translate_time(const CdcConfig& cdc, double src_time_ns, long long dst_sample_index);

struct TranslationBounds {
  double min_abs_ns = 0.0;
  double max_abs_ns = 0.0;
};

TranslationBounds phc_translation_bounds(double t_src_ns);

/// PHC value as read through the CDC stage at true time t: the source
/// counter latched at the last source clock edge (on the PHC's oscillator
/// grid) plus the T_src / 2 calibration term.
double translated_read(const clock::PhcState& phc, TrueTime t, const CdcConfig& cdc);

/// First true time at which the translated counter reaches `value_ns`.
TrueTime translated_crossing(const clock::PhcState& phc, double value_ns, const CdcConfig& cdc);

}  // namespace hybridsync::cdc
