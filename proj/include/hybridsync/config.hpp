// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// JSON configuration documents: experiments (preset or inline topology),
// user channels and budget chains. Unknown keys are always rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hybridsync/budget.hpp"
#include "hybridsync/simeng.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace hybridsync::config {

using nlohmann::json;

inline constexpr std::string_view kExperimentSchema = "hybridsync.experiment/1";
inline constexpr std::string_view kChannelSchema = "hybridsync.channel/1";
inline constexpr std::string_view kChainSchema = "hybridsync.chain/1";

/// Sets `dotted_key` (e.g. "scenario.channel", "topology.hops.2.protocol.kp")
/// in `doc`. `value_text` is parsed as JSON and kept as a string otherwise.
/// Short aliases: channel, scheme, speed, distance_m, cdc_count.
void apply_override(json& doc, std::string_view dotted_key, std::string_view value_text);
std::string canonical_key(std::string_view key);

/// Experiment document -> config. Throws ConfigError naming the bad key.
sim::ExperimentConfig parse_experiment(const json& doc);
/// Fully resolved document (inline topology, every field explicit). Thread
/// count is left out so it never changes digests.
json experiment_to_json(const sim::ExperimentConfig& cfg);
json topology_to_json(const sim::Topology& topo);
sim::Topology parse_topology(const json& doc);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string digest(const json& doc);

struct UserChannel {
  chan::PowerDelayProfile pdp;
  std::optional<chan::FadingConfig> fading;
  std::optional<double> declared_rms_ns;
  std::optional<double> declared_max_excess_ns;
};
/// {name, taps: [{delay_ns, power_db}], fading: {...}, rms_delay_spread_ns?,
///  max_excess_delay_ns?}
UserChannel parse_channel(const json& doc);
json fading_to_json(const chan::FadingConfig& f);
chan::FadingConfig parse_fading(const json& doc);

/// {schema?, hops: [{kind, ts_ns, max_excess_ns, t_ms_ns, t_src_ns, label}]}
/// or a bare array. Errors name the hop index.
std::vector<budget::HopBudget> parse_chain(const json& doc);
json budget_report(const std::vector<budget::HopBudget>& chain);

json read_json_file(const std::string& path);

}  // namespace hybridsync::config
