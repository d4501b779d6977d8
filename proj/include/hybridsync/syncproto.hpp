// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors
//
// Messaging schemes (two-way 802.1AS, FTM bursts, one-way beacons) and the
// path-delay / offset estimators they feed.

#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

#include "hybridsync/cdcmodel.hpp"
#include "hybridsync/clockcore.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace hybridsync::proto {

enum class Scheme { two_way, one_way, ftm_burst };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct SyncSample {
  double t1_ns = 0.0;  // master egress
  double t2_ns = 0.0;  // slave ingress
  std::optional<double> t3_ns;  // slave egress (absent for one-way)
  std::optional<double> t4_ns;  // master ingress (absent for one-way)
  Scheme scheme = Scheme::two_way;
};

struct ProtocolConfig {
  double sync_period_s = 1.0;
  Scheme scheme = Scheme::two_way;
  int burst_length = 1;
  double calibrated_delay_ns = 0.0;
  double kp = 0.7;
  double ki = 0.3;
  /// Slave reply (Delay_Req / ACK) delay after Sync reception.
  double reply_delay_s = 1e-3;
  /// Spacing between exchanges of one FTM burst.
  double burst_spacing_s = 1e-3;

  void validate() const;
};

/// Wired 802.1AS: 1 s exchanges, PI 0.7 / 0.3.
ProtocolConfig wired_ptp_preset();
/// PTP over 802.11: Sync period 1/8 s, PI 0.7 / 0.3.
ProtocolConfig wifi_ptp_preset();
/// w-SHARP beacons: 500 us, PI 0.1 / 0.01, one-way.
ProtocolConfig wsharp_beacon_preset();

class UnsupportedScheme : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// (t2 - t1 + t4 - t3) / 2. Throws UnsupportedScheme for one-way samples.
double estimate_path_delay(const SyncSample& sample);

/// two-way / FTM: t2 - t1 - path delay; one-way: t2 - t1 - calibrated delay.
/// Throws std::invalid_argument on non-finite timestamps.
double estimate_offset(const SyncSample& sample, const ProtocolConfig& config);

struct PortTiming {
  double sample_period_ns = 8.0;
  double phase = 0.0;
};

/// A node's clock as seen from one of its ports. When `cdc` is set the port
/// lives in a different clock domain and reads the PHC through that stage.
struct Endpoint {
  const clock::PhcState* phc = nullptr;
  PortTiming port;
  const cdc::CdcConfig* cdc = nullptr;
};

/// Hardware timestamp taken by `ep` at true time t.
double port_timestamp(const Endpoint& ep, TrueTime t, clock::Direction dir, clock::PortKind kind);

/// One direction of a link. Wireless links add the excess delay picked by
/// the preamble detector on the fading realization at emission time.
struct Link {
  clock::PortKind kind = clock::PortKind::ethernet;
  chan::LinkGeometry geometry;
  std::optional<chan::FadingProcess> fading;
  chan::DetectorPolicy detector;
  /// Fixed extra delay of this direction (asymmetry injection).
  double extra_delay_ns = 0.0;

  static Link ethernet(chan::LinkGeometry geom = {});
  static Link wireless(chan::LinkGeometry geom, std::optional<chan::FadingProcess> fading,
                       chan::DetectorPolicy detector = {});

  /// Emission-to-arrival delay of a frame sent at `emit`.
  double frame_delay_ns(TrueTime emit);
};

struct ExchangeResult {
  SyncSample sample;
  TrueTime completed_at;  // when the slave holds every timestamp
};

ExchangeResult two_way_exchange(const Endpoint& master, const Endpoint& slave, Link& fwd,
                                Link& rev, TrueTime t, const ProtocolConfig& config = {});

ExchangeResult one_way_beacon(const Endpoint& master, const Endpoint& slave, Link& fwd, TrueTime t);

/// `burst_length` back-to-back two-way exchanges; the returned sample holds
/// the per-position means. A burst of one equals two_way_exchange.
ExchangeResult ftm_burst(const Endpoint& master, const Endpoint& slave, Link& fwd, Link& rev,
                         int burst_length, TrueTime t, const ProtocolConfig& config = {});

/// Dispatches on config.scheme.
ExchangeResult run_exchange(const Endpoint& master, const Endpoint& slave, Link& fwd, Link& rev,
                            TrueTime t, const ProtocolConfig& config);

}  // namespace hybridsync::proto
