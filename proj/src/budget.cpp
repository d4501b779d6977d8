// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/budget.hpp"

#include <cmath>

#include "hybridsync/error.hpp"

namespace hybridsync::budget {

std::string_view to_string(HopKind kind) {
  switch (kind) {
    case HopKind::ethernet: return "ethernet";
    case HopKind::wireless_two_way: return "wireless_two_way";
    case HopKind::wireless_one_way: return "wireless_one_way";
    case HopKind::cdc: return "cdc";
  }
  return "?";
}

HopKind hop_kind_from_string(std::string_view s) {
  for (auto k : {HopKind::ethernet, HopKind::wireless_two_way, HopKind::wireless_one_way,
                 HopKind::cdc})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown hop kind '" + std::string(s) + "'");
}

HopBudget HopBudget::ethernet(double ts_ns) { return {HopKind::ethernet, ts_ns, 0, 0, 0, {}}; }

HopBudget HopBudget::wireless_two_way(double ts_ns, double max_excess_ns) {
  return {HopKind::wireless_two_way, ts_ns, max_excess_ns, 0, 0, {}};
}

HopBudget HopBudget::wireless_one_way(double ts_ns, double max_excess_ns, double t_ms_ns) {
  return {HopKind::wireless_one_way, ts_ns, max_excess_ns, t_ms_ns, 0, {}};
}

HopBudget HopBudget::cdc(double t_src_ns) { return {HopKind::cdc, 0, 0, 0, t_src_ns, {}}; }

void HopBudget::validate() const {
  const std::string k(to_string(kind));
  for (double v : {ts_ns, max_excess_ns, t_ms_ns, t_src_ns})
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(k + " hop: fields must be finite and >= 0");
  const bool wireless = kind == HopKind::wireless_two_way || kind == HopKind::wireless_one_way;
  if (kind == HopKind::cdc) {
    if (ts_ns != 0.0 || max_excess_ns != 0.0 || t_ms_ns != 0.0)
      throw ConfigError("cdc hop: only t_src_ns applies");
    if (!(t_src_ns > 0.0)) throw ConfigError("cdc hop: t_src_ns must be > 0");
    return;
  }
  if (t_src_ns != 0.0) throw ConfigError(k + " hop: t_src_ns applies to cdc hops only");
  if (!wireless && max_excess_ns != 0.0)
    throw ConfigError(k + " hop: max_excess_ns applies to wireless hops only");
  if (kind != HopKind::wireless_one_way && t_ms_ns != 0.0)
    throw ConfigError(k + " hop: t_ms_ns applies to one-way wireless hops only");
}

double hop_max_error(const HopBudget& hop) {
  hop.validate();
  const double half_ts = hop.ts_ns / 2.0;
  switch (hop.kind) {
    case HopKind::ethernet: return 2.0 * half_ts;
    case HopKind::wireless_two_way: return half_ts + hop.max_excess_ns / 2.0;
    case HopKind::wireless_one_way: return half_ts + hop.max_excess_ns + hop.t_ms_ns;
    case HopKind::cdc: return hop.t_src_ns / 2.0;
  }
  return 0.0;
}

double chain_max_error(const std::vector<HopBudget>& hops) {
  double total = 0.0;
  for (const auto& hop : hops) total += hop_max_error(hop);
  return total;
}

double wireless_link_budget(const chan::PowerDelayProfile& pdp, proto::Scheme scheme, double ts_ns,
                            double t_ms_ns) {
  if (scheme == proto::Scheme::one_way)
    return hop_max_error(HopBudget::wireless_one_way(ts_ns, pdp.max_excess_delay_ns, t_ms_ns));
  return hop_max_error(HopBudget::wireless_two_way(ts_ns, pdp.max_excess_delay_ns));
}

}  // namespace hybridsync::budget
