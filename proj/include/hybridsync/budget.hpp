// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// Worst-case synchronization error budgets for hops and chains, assuming
// oscillators whose frequency drift is fully compensated.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hybridsync/syncproto.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace hybridsync::budget {

enum class HopKind { ethernet, wireless_two_way, wireless_one_way, cdc };

std::string_view to_string(HopKind kind);
HopKind hop_kind_from_string(std::string_view s);

struct HopBudget {
  HopKind kind = HopKind::ethernet;
  double ts_ns = 0.0;          // port sampling period
  double max_excess_ns = 0.0;  // wireless only
  double t_ms_ns = 0.0;        // uncalibrated propagation, one-way only
  double t_src_ns = 0.0;       // cdc only
  std::string label;           // free text for reports

  static HopBudget ethernet(double ts_ns);
  static HopBudget wireless_two_way(double ts_ns, double max_excess_ns);
  static HopBudget wireless_one_way(double ts_ns, double max_excess_ns, double t_ms_ns);
  static HopBudget cdc(double t_src_ns);

  /// Throws ConfigError when a field is negative/non-finite or set for a
  /// kind that does not use it.
  void validate() const;
};

/// ethernet: T_s (ingress and egress each T_s/2); two-way wireless:
/// T_s/2 + max_excess/2; one-way wireless: T_s/2 + max_excess + t_ms;
/// cdc: T_src/2.
double hop_max_error(const HopBudget& hop);

double chain_max_error(const std::vector<HopBudget>& hops);

/// Wireless hop budget from a power delay profile. ftm_burst counts as two-way.
double wireless_link_budget(const chan::PowerDelayProfile& pdp, proto::Scheme scheme, double ts_ns,
                            double t_ms_ns);

}  // namespace hybridsync::budget
