// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// Deterministic discrete-event simulation of boundary-clock chains from a
// grandmaster to a device under test, with PPS-edge error measurement.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsync/budget.hpp"
#include "hybridsync/cdcmodel.hpp"
#include "hybridsync/clockcore.hpp"
#include "hybridsync/stats.hpp"
#include "hybridsync/syncproto.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace hybridsync::sim {

enum class Role { gmc, boundary, translator, sta, reference };
enum class Medium { ethernet, wireless };

std::string_view to_string(Role r);
std::string_view to_string(Medium m);
Role role_from_string(std::string_view s);
Medium medium_from_string(std::string_view s);

inline constexpr double kEthernetSamplePeriodNs = 8.0;
inline constexpr double kWirelessSamplePeriodNs = 50.0;
inline constexpr double kEmulatorBaseDelayNs = 1135.0;

struct NodeSpec {
  std::string id;
  Role role = Role::boundary;
  clock::ClockModel clock;
  double resolution_ns = 1.0;
  /// Anti-windup bound and initial integrator. The gains are taken from the
  /// protocol of the hop that disciplines this node.
  clock::ServoState servo;
};

struct HopSpec {
  std::string from;  // master side
  std::string to;    // slave side
  Medium medium = Medium::ethernet;
  chan::LinkGeometry geometry;
  std::optional<chan::PowerDelayProfile> pdp;  // wireless only
  chan::FadingConfig fading;                   // wireless only
  chan::DetectorPolicy detector;
  proto::ProtocolConfig protocol;
  double port_period_ns = kEthernetSamplePeriodNs;
  double start_offset_s = 0.2;  // first exchange, on the master's timeline
};

struct CdcStage {
  std::string node_id;
  cdc::CdcConfig config;
};

/// A tree rooted at the grandmaster: the chain to the device under test plus,
/// optionally, a branch to a reference node used for relative PPS error.
struct Topology {
  std::string name;
  std::vector<NodeSpec> nodes;
  std::vector<HopSpec> hops;
  std::vector<CdcStage> cdc_stages;
  std::string dut;  // empty: the last node of the chain

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  int node_index(std::string_view id) const;  // -1 if absent
  int gmc_index() const;
  int dut_index() const;
  int reference_index() const;  // gmc when no reference node exists
  /// Hop indices from the grandmaster down to `node`.
  std::vector<int> path_to(int node) const;
  const cdc::CdcConfig* cdc_of(int node) const;
};

/// Budget terms for the measured PPS pair: the hops and CDC stages that are
/// not shared between the DUT path and the reference path.
std::vector<budget::HopBudget> topology_budget(const Topology& topo);

struct ExperimentConfig {
  Topology topology;
  double duration_s = 1100.0;
  double warmup_s = 100.0;
  double pps_interval_s = 1.0;
  int replicas = 1;
  std::uint64_t seed = 1;
  /// When set, every fading wireless hop gets f_d from this speed.
  std::optional<double> channel_speed_kmh;
  /// Each non-grandmaster oscillator gets drift_ppm + U(-range, range).
  double drift_range_ppm = 10.0;
  /// Draw oscillator, port and CDC phases uniformly per replica.
  bool randomize_phases = true;
  int threads = 1;

  void validate() const;
};

struct ReplicaResult {
  std::vector<double> true_time_s;
  std::vector<double> pps_error_ns;
  bool converged = true;
};

struct ExperimentResult {
  RunStats stats;  // pooled over replicas; per_replica filled in order
  std::vector<ReplicaResult> replicas;
  double budget_ns = 0.0;
  bool converged = true;
};

/// Runs every replica; bit-identical for identical config regardless of the
/// thread count. Throws ConfigError for invalid configurations.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// One replica; exposed for tests.
ReplicaResult run_replica(const ExperimentConfig& config, int replica_index);

/// True-time difference between the reference's and the slave's PPS edges at
/// the whole-second boundary `edge_value_ns` (positive when the slave is
/// ahead). Each clock may be read through a CDC stage.
double pps_error(const clock::PhcState& slave, const cdc::CdcConfig* slave_cdc,
                 const clock::PhcState& reference, const cdc::CdcConfig* reference_cdc,
                 double edge_value_ns);

/// Named topology presets.
struct Scenario {
  std::string family = "emulator";  // calnex | calnex-ethernet | emulator | ota
  std::string wireless = "80211";   // 80211 | wsharp | ftm
  std::string channel = "AWGN";
  int cdc_count = 1;                // emulator only: 1 or 2
  double distance_m = 0.0;          // wireless propagation beyond the emulator
  double speed_kmh = 10.0;          // 0: static channel
  int burst_length = 8;             // ftm only
  std::optional<double> calibrated_delay_ns;
  std::string detector = "strongest_tap";
  double detector_threshold_db = 6.0;
};

/// "calnex", "calnex-awgn", "calnex-ethernet", "emulator-80211-wlanC",
/// "emulator-wsharp-iwlanB", "emulator-ftm-awgn", "ota-wsharp", ... with an
/// optional "-2cdc" suffix.
Scenario scenario_from_preset(std::string_view preset);
Topology build_topology(const Scenario& scenario);
const std::vector<std::string>& preset_names();

}  // namespace hybridsync::sim
