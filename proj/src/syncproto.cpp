// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/syncproto.hpp"

#include <cmath>
#include <string>

#include "hybridsync/error.hpp"

namespace hybridsync::proto {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::two_way: return "two_way";
    case Scheme::one_way: return "one_way";
    case Scheme::ftm_burst: return "ftm_burst";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "two_way") return Scheme::two_way;
  if (s == "one_way") return Scheme::one_way;
  if (s == "ftm_burst") return Scheme::ftm_burst;
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

void ProtocolConfig::validate() const {
  if (!(sync_period_s > 0.0)) throw ConfigError("sync_period_s must be > 0");
  if (burst_length < 1) throw ConfigError("burst_length must be >= 1");
  if (!(reply_delay_s >= 0.0) || !(burst_spacing_s > 0.0))
    throw ConfigError("reply_delay_s must be >= 0 and burst_spacing_s > 0");
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(calibrated_delay_ns))
    throw ConfigError("protocol gains and calibrated delay must be finite");
}

ProtocolConfig wired_ptp_preset() { return {}; }

ProtocolConfig wifi_ptp_preset() {
  ProtocolConfig c;
  c.sync_period_s = 1.0 / 8.0;
  return c;
}

ProtocolConfig wsharp_beacon_preset() {
  ProtocolConfig c;
  c.sync_period_s = 500e-6;
  c.scheme = Scheme::one_way;
  c.kp = 0.1;
  c.ki = 0.01;
  return c;
}

double estimate_path_delay(const SyncSample& s) {
  if (s.scheme == Scheme::one_way || !s.t3_ns || !s.t4_ns)
    throw UnsupportedScheme("path delay needs a two-way sample");
  return (s.t2_ns - s.t1_ns + *s.t4_ns - *s.t3_ns) / 2.0;
}

double estimate_offset(const SyncSample& s, const ProtocolConfig& config) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(s.t1_ns) || !finite(s.t2_ns) || (s.t3_ns && !finite(*s.t3_ns)) ||
      (s.t4_ns && !finite(*s.t4_ns)))
    throw std::invalid_argument("estimate_offset: non-finite timestamp");
  switch (s.scheme) {
    case Scheme::one_way:
      return s.t2_ns - s.t1_ns - config.calibrated_delay_ns;
    case Scheme::two_way:
    case Scheme::ftm_burst:
      return s.t2_ns - s.t1_ns - estimate_path_delay(s);
  }
  throw UnsupportedScheme("unknown scheme");
}

double port_timestamp(const Endpoint& ep, TrueTime t, clock::Direction dir, clock::PortKind kind) {
  const TrueTime at = clock::port_quantizes(kind, dir)
                          ? ep.phc->sample_instant(t, ep.port.sample_period_ns, ep.port.phase,
                                                   clock::GridRounding::nearest)
                          : t;
  return ep.cdc ? cdc::translated_read(*ep.phc, at, *ep.cdc) : ep.phc->read_ns(at);
}

Link Link::ethernet(chan::LinkGeometry geom) {
  Link l;
  l.kind = clock::PortKind::ethernet;
  l.geometry = geom;
  return l;
}

Link Link::wireless(chan::LinkGeometry geom, std::optional<chan::FadingProcess> fading,
                    chan::DetectorPolicy detector) {
  Link l;
  l.kind = clock::PortKind::wireless;
  l.geometry = geom;
  l.fading = std::move(fading);
  l.detector = detector;
  return l;
}

double Link::frame_delay_ns(TrueTime emit) {
  double d = chan::propagation_delay(geometry) + extra_delay_ns;
  if (fading) d += chan::detect_arrival(fading->realize(emit), fading->pdp(), detector);
  return d;
}

namespace {

using clock::Direction;

struct Leg {
  double tx_ns;
  double rx_ns;
  TrueTime arrival;
};

Leg send(const Endpoint& from, const Endpoint& to, Link& link, TrueTime emit) {
  const double tx = port_timestamp(from, emit, Direction::egress, link.kind);
  const TrueTime arrival = emit + TrueTime::from_ns(link.frame_delay_ns(emit));
  const double rx = port_timestamp(to, arrival, Direction::ingress, link.kind);
  return {tx, rx, arrival};
}

}  // namespace

ExchangeResult two_way_exchange(const Endpoint& master, const Endpoint& slave, Link& fwd,
                                Link& rev, TrueTime t, const ProtocolConfig& config) {
  const Leg sync = send(master, slave, fwd, t);
  const TrueTime req_at = sync.arrival + TrueTime::from_s(config.reply_delay_s);
  const Leg req = send(slave, master, rev, req_at);
  // Delay_Resp carries t4 back; it crosses the forward link once more.
  const TrueTime done = req.arrival + TrueTime::from_ns(chan::propagation_delay(fwd.geometry));
  SyncSample s;
  s.scheme = Scheme::two_way;
  s.t1_ns = sync.tx_ns;
  s.t2_ns = sync.rx_ns;
  s.t3_ns = req.tx_ns;
  s.t4_ns = req.rx_ns;
  return {s, done};
}

ExchangeResult one_way_beacon(const Endpoint& master, const Endpoint& slave, Link& fwd, TrueTime t) {
  const Leg beacon = send(master, slave, fwd, t);
  SyncSample s;
  s.scheme = Scheme::one_way;
  s.t1_ns = beacon.tx_ns;
  s.t2_ns = beacon.rx_ns;
  return {s, beacon.arrival};
}

ExchangeResult ftm_burst(const Endpoint& master, const Endpoint& slave, Link& fwd, Link& rev,
                         int burst_length, TrueTime t, const ProtocolConfig& config) {
  if (burst_length < 1) throw std::invalid_argument("burst_length must be >= 1");
  if (burst_length == 1) {
    auto r = two_way_exchange(master, slave, fwd, rev, t, config);
    r.sample.scheme = Scheme::ftm_burst;
    return r;
  }
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
  TrueTime done;
  for (int k = 0; k < burst_length; ++k) {
    const TrueTime at = t + TrueTime::from_s(config.burst_spacing_s * k);
    const auto r = two_way_exchange(master, slave, fwd, rev, at, config);
    // Average offsets from the first exchange so the means keep full precision.
    if (k == 0) {
      t1 = r.sample.t1_ns;
      t2 = r.sample.t2_ns;
      t3 = *r.sample.t3_ns;
      t4 = *r.sample.t4_ns;
    }
    done = r.completed_at;
    if (k == 0) continue;
    const double w = 1.0 / (k + 1);
    t1 += (r.sample.t1_ns - t1) * w;
    t2 += (r.sample.t2_ns - t2) * w;
    t3 += (*r.sample.t3_ns - t3) * w;
    t4 += (*r.sample.t4_ns - t4) * w;
  }
  SyncSample s;
  s.scheme = Scheme::ftm_burst;
  s.t1_ns = t1;
  s.t2_ns = t2;
  s.t3_ns = t3;
  s.t4_ns = t4;
  return {s, done};
}

ExchangeResult run_exchange(const Endpoint& master, const Endpoint& slave, Link& fwd, Link& rev,
                            TrueTime t, const ProtocolConfig& config) {
  switch (config.scheme) {
    case Scheme::two_way: return two_way_exchange(master, slave, fwd, rev, t, config);
    case Scheme::one_way: return one_way_beacon(master, slave, fwd, t);
    case Scheme::ftm_burst:
      return ftm_burst(master, slave, fwd, rev, config.burst_length, t, config);
  }
  throw UnsupportedScheme("unknown scheme");
}

}  // namespace hybridsync::proto
