// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/cdcmodel.hpp"

#include <cmath>
#include <string>

#include "hybridsync/error.hpp"

namespace hybridsync::cdc {

void CdcConfig::validate() const {
  if (!(t_src_ns > 0.0) || !(t_dst_ns > 0.0))
    throw ConfigError("CDC periods must be > 0");
  if (t_src_ns < 4.0 * t_dst_ns)
    throw ConfigError("CDC infeasible: T_src = " + std::to_string(t_src_ns) +
                      " ns < 4 * T_dst = " + std::to_string(4.0 * t_dst_ns) +
                      " ns (metastability risk)");
  if (!(dst_phase >= 0.0 && dst_phase < 1.0)) throw ConfigError("CDC dst_phase must lie in [0, 1)");
  if (!std::isfinite(rho_dst_ppm)) throw ConfigError("CDC rho_dst_ppm must be finite");
}

Translation translate_time(const CdcConfig& cdc, double src_time_ns, long long dst_sample_index) {
  cdc.validate();
  const double n = static_cast<double>(dst_sample_index);
  const double sample =
      src_time_ns + cdc.t_dst_ns * (n + cdc.dst_phase) * (1.0 + cdc.rho_dst_ppm * 1e-6);
  const double read = cdc.t_src_ns * std::floor(sample / cdc.t_src_ns) + 0.5 * cdc.t_src_ns;
  return {read, read - sample};
}

TranslationBounds phc_translation_bounds(double t_src_ns) {
  if (!(t_src_ns > 0.0)) throw ConfigError("t_src_ns must be > 0");
  return {0.0, 0.5 * t_src_ns};
}

double translated_read(const clock::PhcState& phc, TrueTime t, const CdcConfig& cdc) {
  const double phase = phc.base_clock().phase;
  const TrueTime edge = phc.sample_instant(t, cdc.t_src_ns, phase, clock::GridRounding::floor);
  const double value = phc.time_ns(edge) + 0.5 * cdc.t_src_ns;
  return std::round(value / phc.resolution_ns()) * phc.resolution_ns();
}

TrueTime translated_crossing(const clock::PhcState& phc, double value_ns, const CdcConfig& cdc) {
  const double phase = phc.base_clock().phase;
  const TrueTime raw = phc.crossing_time(value_ns - 0.5 * cdc.t_src_ns);
  TrueTime edge = phc.sample_instant(raw, cdc.t_src_ns, phase, clock::GridRounding::ceil);
  // The edge instant is rounded to the picosecond and may sit just before
  // the true edge, where a read still latches the previous source value.
  const TrueTime latched = phc.sample_instant(edge, cdc.t_src_ns, phase, clock::GridRounding::floor);
  if ((edge - latched).ns() > 0.5 * cdc.t_src_ns) edge += TrueTime::from_ps(1);
  return edge;
}

}  // namespace hybridsync::cdc
