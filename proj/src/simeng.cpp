// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/simeng.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <cmath>
#include <queue>
#include <set>
#include <string>
#include <thread>

#include "hybridsync/error.hpp"

namespace hybridsync::sim {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::gmc: return "gmc";
    case Role::boundary: return "boundary";
    case Role::translator: return "translator";
    case Role::sta: return "sta";
    case Role::reference: return "reference";
  }
  return "?";
}

std::string_view to_string(Medium m) { return m == Medium::ethernet ? "ethernet" : "wireless"; }

Role role_from_string(std::string_view s) {
  for (Role r : {Role::gmc, Role::boundary, Role::translator, Role::sta, Role::reference})
    if (s == to_string(r)) return r;
  throw ConfigError("unknown node role '" + std::string(s) + "'");
}

Medium medium_from_string(std::string_view s) {
  if (s == "ethernet") return Medium::ethernet;
  if (s == "wireless") return Medium::wireless;
  throw ConfigError("unknown medium '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- topology

int Topology::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

int Topology::gmc_index() const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].role == Role::gmc) return static_cast<int>(i);
  return -1;
}

int Topology::dut_index() const {
  if (!dut.empty()) return node_index(dut);
  // Last node of the chain: the deepest node that is not a reference.
  int best = -1;
  std::size_t depth = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].role == Role::reference || nodes[i].role == Role::gmc) continue;
    const auto p = path_to(static_cast<int>(i));
    if (best < 0 || p.size() >= depth) {
      best = static_cast<int>(i);
      depth = p.size();
    }
  }
  return best;
}

int Topology::reference_index() const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].role == Role::reference) return static_cast<int>(i);
  return gmc_index();
}

std::vector<int> Topology::path_to(int node) const {
  std::vector<int> path;
  int cur = node;
  for (std::size_t guard = 0; guard <= hops.size(); ++guard) {
    if (cur < 0 || nodes[static_cast<std::size_t>(cur)].role == Role::gmc) break;
    int up = -1;
    for (std::size_t h = 0; h < hops.size(); ++h)
      if (hops[h].to == nodes[static_cast<std::size_t>(cur)].id) up = static_cast<int>(h);
    if (up < 0) throw ConfigError("node '" + nodes[static_cast<std::size_t>(cur)].id +
                                  "' is not reachable from the gmc");
    path.push_back(up);
    cur = node_index(hops[static_cast<std::size_t>(up)].from);
  }
  if (cur < 0 || nodes[static_cast<std::size_t>(cur)].role != Role::gmc)
    throw ConfigError("hops contain a cycle");
  std::reverse(path.begin(), path.end());
  return path;
}

const cdc::CdcConfig* Topology::cdc_of(int node) const {
  if (node < 0) return nullptr;
  for (const auto& s : cdc_stages)
    if (s.node_id == nodes[static_cast<std::size_t>(node)].id) return &s.config;
  return nullptr;
}

void Topology::validate() const {
  if (nodes.empty()) throw ConfigError("topology has no nodes");
  std::set<std::string> ids;
  int gmcs = 0, refs = 0;
  for (const auto& n : nodes) {
    if (n.id.empty()) throw ConfigError("node id must not be empty");
    if (!ids.insert(n.id).second) throw ConfigError("duplicate node id '" + n.id + "'");
    if (n.role == Role::gmc) ++gmcs;
    if (n.role == Role::reference) ++refs;
    if (!(n.resolution_ns > 0.0)) throw ConfigError("node '" + n.id + "': resolution_ns must be > 0");
    if (!(n.servo.anti_windup_ppm > 0.0))
      throw ConfigError("node '" + n.id + "': anti_windup_ppm must be > 0");
    try {
      n.clock.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("node '" + n.id + "': " + e.what());
    }
  }
  if (gmcs != 1) throw ConfigError("topology needs exactly one gmc, found " + std::to_string(gmcs));
  if (refs > 1) throw ConfigError("topology allows at most one reference node");

  std::set<std::string> fed;
  for (std::size_t h = 0; h < hops.size(); ++h) {
    const auto& hop = hops[h];
    const std::string where = "hop " + std::to_string(h) + " (" + hop.from + "->" + hop.to + ")";
    if (node_index(hop.from) < 0 || node_index(hop.to) < 0)
      throw ConfigError(where + ": unknown node");
    if (hop.from == hop.to) throw ConfigError(where + ": self loop");
    if (nodes[static_cast<std::size_t>(node_index(hop.to))].role == Role::gmc)
      throw ConfigError(where + ": the gmc cannot be disciplined");
    if (!fed.insert(hop.to).second) throw ConfigError(where + ": node has two upstream hops");
    if (!(hop.port_period_ns > 0.0)) throw ConfigError(where + ": port_period_ns must be > 0");
    if (!(hop.start_offset_s >= 0.0)) throw ConfigError(where + ": start_offset_s must be >= 0");
    if (!(hop.geometry.distance_m >= 0.0) || !(hop.geometry.base_delay_ns >= 0.0))
      throw ConfigError(where + ": geometry must be non-negative");
    try {
      hop.protocol.validate();
      if (hop.medium == Medium::wireless) {
        if (!hop.pdp) throw ConfigError("wireless hop needs a pdp");
        hop.fading.validate();
      } else {
        if (hop.pdp) throw ConfigError("ethernet hop cannot carry a pdp");
        if (hop.protocol.scheme != proto::Scheme::two_way)
          throw ConfigError("ethernet hops run two-way exchanges");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  for (const auto& n : nodes)
    if (n.role != Role::gmc && !fed.count(n.id))
      throw ConfigError("node '" + n.id + "' has no upstream hop");

  std::set<std::string> staged;
  for (const auto& s : cdc_stages) {
    if (node_index(s.node_id) < 0) throw ConfigError("cdc stage on unknown node '" + s.node_id + "'");
    if (!staged.insert(s.node_id).second)
      throw ConfigError("node '" + s.node_id + "' has two cdc stages");
    s.config.validate();
  }

  const int d = dut_index();
  if (d < 0) throw ConfigError(dut.empty() ? "topology has no device under test"
                                           : "unknown dut '" + dut + "'");
  if (nodes[static_cast<std::size_t>(d)].role == Role::gmc)
    throw ConfigError("the dut cannot be the gmc");
  // Every node must lie on the DUT path or the reference path.
  std::set<int> covered{gmc_index()};
  for (int n : {d, reference_index()}) {
    covered.insert(n);
    for (int h : path_to(n)) covered.insert(node_index(hops[static_cast<std::size_t>(h)].to));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!covered.count(static_cast<int>(i)))
      throw ConfigError("node '" + nodes[i].id + "' is neither on the dut nor the reference path");
}

std::vector<budget::HopBudget> topology_budget(const Topology& topo) {
  topo.validate();
  const auto dut_path = topo.path_to(topo.dut_index());
  const auto ref_path = topo.path_to(topo.reference_index());
  std::set<int> on_dut(dut_path.begin(), dut_path.end());
  std::set<int> on_ref(ref_path.begin(), ref_path.end());

  std::vector<int> hops;
  for (int h : dut_path)
    if (!on_ref.count(h)) hops.push_back(h);
  for (int h : ref_path)
    if (!on_dut.count(h)) hops.push_back(h);

  std::vector<budget::HopBudget> out;
  std::vector<int> clocked;  // nodes whose exported time enters the measurement
  auto note = [&](int n) {
    if (std::find(clocked.begin(), clocked.end(), n) == clocked.end()) clocked.push_back(n);
  };
  for (int h : hops) {
    const auto& hop = topo.hops[static_cast<std::size_t>(h)];
    budget::HopBudget b;
    if (hop.medium == Medium::ethernet) {
      b = budget::HopBudget::ethernet(hop.port_period_ns);
    } else if (hop.protocol.scheme == proto::Scheme::one_way) {
      const double t_ms =
          std::abs(chan::propagation_delay(hop.geometry) - hop.protocol.calibrated_delay_ns);
      b = budget::HopBudget::wireless_one_way(hop.port_period_ns, hop.pdp->max_excess_delay_ns, t_ms);
    } else {
      b = budget::HopBudget::wireless_two_way(hop.port_period_ns, hop.pdp->max_excess_delay_ns);
    }
    b.label = hop.from + "->" + hop.to;
    out.push_back(std::move(b));
    note(topo.node_index(hop.from));
  }
  note(topo.dut_index());
  note(topo.reference_index());
  for (int n : clocked) {
    if (const auto* c = topo.cdc_of(n)) {
      auto b = budget::HopBudget::cdc(c->t_src_ns);
      b.label = topo.nodes[static_cast<std::size_t>(n)].id + " cdc";
      out.push_back(std::move(b));
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  topology.validate();
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration_s must be > 0");
  if (!(warmup_s >= 0.0) || warmup_s > duration_s)
    throw ConfigError("warmup_s must lie in [0, duration_s]");
  if (!(pps_interval_s > 0.0)) throw ConfigError("pps_interval_s must be > 0");
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(drift_range_ppm >= 0.0)) throw ConfigError("drift_range_ppm must be >= 0");
  if (channel_speed_kmh && !(*channel_speed_kmh >= 0.0))
    throw ConfigError("channel_speed_kmh must be >= 0");
  const auto edges = static_cast<long long>(std::floor(duration_s / pps_interval_s + 1e-9)) -
                     static_cast<long long>(std::floor(warmup_s / pps_interval_s + 1e-9));
  if (edges < 2) throw ConfigError("fewer than two PPS edges after warmup");
}

// ------------------------------------------------------------------ engine

double pps_error(const clock::PhcState& slave, const cdc::CdcConfig* slave_cdc,
                 const clock::PhcState& reference, const cdc::CdcConfig* reference_cdc,
                 double edge_value_ns) {
  auto crossing = [edge_value_ns](const clock::PhcState& phc, const cdc::CdcConfig* c) {
    return c ? cdc::translated_crossing(phc, edge_value_ns, *c) : phc.crossing_time(edge_value_ns);
  };
  return (crossing(reference, reference_cdc) - crossing(slave, slave_cdc)).ns();
}

namespace {

enum class EventKind { exchange, servo, pps, drift_walk };

struct Event {
  TrueTime at;
  std::uint64_t seq;
  EventKind kind;
  int index;             // hop (exchange, servo), node or PPS edge number
  double estimate = 0.0; // servo only
  double interval_s = 0.0;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    return a.seq > b.seq;
  }
};

struct NodeRt {
  clock::PhcState phc;
  clock::ServoState servo;
  std::optional<cdc::CdcConfig> cdc;
  RngStream walk{0};
};

struct HopRt {
  int from = 0, to = 0;
  proto::Link fwd, rev;
  proto::PortTiming master_port, slave_port;
  long long count = 0;
};

// Per-replica stream keys.
enum : std::uint64_t { kPhaseKey = 1, kDriftKey = 2, kFadingKey = 3, kWalkKey = 4 };

}  // namespace

ReplicaResult run_replica(const ExperimentConfig& config, int replica_index) {
  const Topology& topo = config.topology;
  const double budget_ns = budget::chain_max_error(topology_budget(topo));
  const RngStream root = RngStream(config.seed).split(static_cast<std::uint64_t>(replica_index));
  RngStream phases = root.split(kPhaseKey);
  RngStream drifts = root.split(kDriftKey);
  const RngStream fading_root = root.split(kFadingKey);
  const RngStream walk_root = root.split(kWalkKey);

  std::vector<NodeRt> nodes;
  nodes.reserve(topo.nodes.size());
  for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
    const auto& spec = topo.nodes[i];
    clock::ClockModel c = spec.clock;
    if (config.randomize_phases) c.phase = phases.uniform();
    if (spec.role != Role::gmc && config.drift_range_ppm > 0.0)
      c.drift_ppm += drifts.uniform(-config.drift_range_ppm, config.drift_range_ppm);
    NodeRt rt{clock::PhcState(c, spec.resolution_ns), spec.servo, std::nullopt,
              walk_root.split(i)};
    rt.servo.locked = false;
    if (const auto* stage = topo.cdc_of(static_cast<int>(i))) {
      rt.cdc = *stage;
      if (config.randomize_phases) rt.cdc->dst_phase = phases.uniform();
    }
    nodes.push_back(std::move(rt));
  }

  std::vector<HopRt> hops;
  hops.reserve(topo.hops.size());
  for (std::size_t h = 0; h < topo.hops.size(); ++h) {
    const auto& spec = topo.hops[h];
    HopRt rt;
    rt.from = topo.node_index(spec.from);
    rt.to = topo.node_index(spec.to);
    rt.master_port = {spec.port_period_ns, config.randomize_phases ? phases.uniform() : 0.0};
    rt.slave_port = {spec.port_period_ns, config.randomize_phases ? phases.uniform() : 0.0};
    if (spec.medium == Medium::ethernet) {
      rt.fwd = proto::Link::ethernet(spec.geometry);
      rt.rev = proto::Link::ethernet(spec.geometry);
    } else {
      auto make = [&](std::uint64_t dir) -> std::optional<chan::FadingProcess> {
        // A single-tap profile always detects the first path.
        if (spec.pdp->taps.size() < 2) return std::nullopt;
        chan::FadingConfig f = spec.fading;
        if (config.channel_speed_kmh) f.doppler_hz = chan::doppler_from_speed(*config.channel_speed_kmh, f.carrier_hz);
        return chan::FadingProcess(*spec.pdp, f, fading_root.split(h).split(dir).seed());
      };
      rt.fwd = proto::Link::wireless(spec.geometry, make(0), spec.detector);
      rt.rev = proto::Link::wireless(spec.geometry, make(1), spec.detector);
    }
    hops.push_back(std::move(rt));
  }

  std::priority_queue<Event, std::vector<Event>, Later> queue;
  std::uint64_t seq = 0;
  auto push = [&](Event e) {
    e.seq = seq++;
    queue.push(e);
  };

  const TrueTime end = TrueTime::from_s(config.duration_s);
  for (std::size_t h = 0; h < hops.size(); ++h)
    push({TrueTime::from_s(topo.hops[h].start_offset_s), 0, EventKind::exchange, static_cast<int>(h)});
  const auto n_edges = static_cast<long long>(std::floor(config.duration_s / config.pps_interval_s + 1e-9));
  if (n_edges >= 1) push({TrueTime::from_s(config.pps_interval_s), 0, EventKind::pps, 1});
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].phc.base_clock().drift_walk_sigma_ppm_per_s > 0.0)
      push({TrueTime::from_s(0.5), 0, EventKind::drift_walk, static_cast<int>(i)});

  const int dut = topo.dut_index();
  const int ref = topo.reference_index();
  ReplicaResult out;
  const auto expected = static_cast<std::size_t>(
      std::max(0LL, n_edges - static_cast<long long>(std::floor(config.warmup_s / config.pps_interval_s + 1e-9))));
  out.true_time_s.reserve(expected);
  out.pps_error_ns.reserve(expected);

  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.at > end) break;
    queue.pop();
    switch (ev.kind) {
      case EventKind::exchange: {
        auto& hop = hops[static_cast<std::size_t>(ev.index)];
        const auto& spec = topo.hops[static_cast<std::size_t>(ev.index)];
        auto& master = nodes[static_cast<std::size_t>(hop.from)];
        auto& slave = nodes[static_cast<std::size_t>(hop.to)];
        const proto::Endpoint m{&master.phc, hop.master_port, master.cdc ? &*master.cdc : nullptr};
        const proto::Endpoint s{&slave.phc, hop.slave_port, nullptr};
        const auto r = proto::run_exchange(m, s, hop.fwd, hop.rev, ev.at, spec.protocol);
        Event apply{r.completed_at, 0, EventKind::servo, ev.index};
        apply.estimate = proto::estimate_offset(r.sample, spec.protocol);
        apply.interval_s = spec.protocol.sync_period_s;
        push(apply);
        // Next exchange follows the master's own notion of the schedule.
        ++hop.count;
        const double next_value =
            (spec.start_offset_s + static_cast<double>(hop.count) * spec.protocol.sync_period_s) * 1e9;
        TrueTime next = master.phc.crossing_time(next_value);
        if (next <= ev.at) next = ev.at + TrueTime::from_s(spec.protocol.sync_period_s);
        push({next, 0, EventKind::exchange, ev.index});
        break;
      }
      case EventKind::servo: {
        // The servo of a node takes its gains from the hop that disciplines it.
        const auto& gains = topo.hops[static_cast<std::size_t>(ev.index)].protocol;
        auto& node = nodes[static_cast<std::size_t>(hops[static_cast<std::size_t>(ev.index)].to)];
        node.servo.kp = gains.kp;
        node.servo.ki = gains.ki;
        const auto step = clock::servo_update(node.servo, ev.estimate, ev.interval_s);
        clock::apply_servo_step(node.phc, ev.at, step);
        break;
      }
      case EventKind::pps: {
        const double value = static_cast<double>(ev.index) * config.pps_interval_s * 1e9;
        const auto& d = nodes[static_cast<std::size_t>(dut)];
        const auto& r = nodes[static_cast<std::size_t>(ref)];
        const double err = pps_error(d.phc, d.cdc ? &*d.cdc : nullptr, r.phc,
                                     r.cdc ? &*r.cdc : nullptr, value);
        const double t_s = value * 1e-9;
        if (t_s > config.warmup_s + 1e-9) {
          out.true_time_s.push_back(t_s);
          out.pps_error_ns.push_back(err);
          if (std::abs(err) > 10.0 * budget_ns) out.converged = false;
        }
        if (ev.index < n_edges)
          push({TrueTime::from_s(static_cast<double>(ev.index + 1) * config.pps_interval_s), 0,
                EventKind::pps, ev.index + 1});
        break;
      }
      case EventKind::drift_walk: {
        auto& node = nodes[static_cast<std::size_t>(ev.index)];
        const auto next = clock::advance_drift(node.phc.base_clock(), 1.0, node.walk);
        node.phc.set_drift(ev.at, next.drift_ppm);
        push({ev.at + TrueTime::from_s(1.0), 0, EventKind::drift_walk, ev.index});
        break;
      }
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult res;
  res.budget_ns = budget::chain_max_error(topology_budget(config.topology));
  res.replicas.resize(static_cast<std::size_t>(config.replicas));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int i = next++; i < config.replicas; i = next++) {
      try {
        res.replicas[static_cast<std::size_t>(i)] = run_replica(config, i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(config.threads, config.replicas);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> pooled;
  std::vector<RunStats> per;
  for (const auto& r : res.replicas) {
    pooled.insert(pooled.end(), r.pps_error_ns.begin(), r.pps_error_ns.end());
    per.push_back(compute_stats(r.pps_error_ns));
    res.converged = res.converged && r.converged;
  }
  res.stats = compute_stats(pooled);
  res.stats.per_replica = std::move(per);
  return res;
}

// ----------------------------------------------------------------- presets

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

NodeSpec make_node(std::string id, Role role, double offset_ns) {
  NodeSpec n;
  n.id = std::move(id);
  n.role = role;
  n.clock.offset_ns = offset_ns;
  return n;
}

HopSpec ethernet_hop(std::string from, std::string to, double start_s, double distance_m = 1.0) {
  HopSpec h;
  h.from = std::move(from);
  h.to = std::move(to);
  h.medium = Medium::ethernet;
  h.geometry = {distance_m, 0.0};
  h.protocol = proto::wired_ptp_preset();
  h.port_period_ns = kEthernetSamplePeriodNs;
  h.start_offset_s = start_s;
  return h;
}

HopSpec wireless_hop(const Scenario& sc, std::string from, std::string to, chan::LinkGeometry geom,
                     double default_calibration_ns) {
  HopSpec h;
  h.from = std::move(from);
  h.to = std::move(to);
  h.medium = Medium::wireless;
  h.geometry = geom;
  h.pdp = chan::build_pdp(sc.channel);
  h.port_period_ns = kWirelessSamplePeriodNs;
  if (sc.detector == "strongest_tap") {
    h.detector.kind = chan::DetectorPolicy::Kind::strongest_tap;
  } else if (sc.detector == "first_above_threshold") {
    h.detector.kind = chan::DetectorPolicy::Kind::first_above_threshold;
  } else {
    throw ConfigError("unknown detector '" + sc.detector + "'");
  }
  h.detector.threshold_db = sc.detector_threshold_db;
  h.fading.doppler_hz = chan::doppler_from_speed(sc.speed_kmh, h.fading.carrier_hz);
  if (sc.wireless == "80211") {
    h.protocol = proto::wifi_ptp_preset();
    h.start_offset_s = 0.0371;
  } else if (sc.wireless == "ftm") {
    h.protocol = proto::wifi_ptp_preset();
    h.protocol.scheme = proto::Scheme::ftm_burst;
    h.protocol.burst_length = sc.burst_length;
    h.start_offset_s = 0.0371;
  } else if (sc.wireless == "wsharp") {
    h.protocol = proto::wsharp_beacon_preset();
    h.protocol.calibrated_delay_ns = sc.calibrated_delay_ns.value_or(default_calibration_ns);
    h.start_offset_s = 0.000123;
  } else {
    throw ConfigError("unknown wireless scheme '" + sc.wireless + "' (80211, wsharp, ftm)");
  }
  if (sc.wireless != "wsharp" && sc.calibrated_delay_ns)
    h.protocol.calibrated_delay_ns = *sc.calibrated_delay_ns;
  return h;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"calnex", "calnex-awgn", "calnex-ethernet"};
    for (const char* w : {"80211", "wsharp", "ftm"})
      for (const char* c : {"awgn", "wlanA", "wlanC", "iwlanA", "iwlanB"})
        v.push_back(std::string("emulator-") + w + "-" + c);
    for (const char* w : {"80211", "wsharp", "ftm"}) v.push_back(std::string("ota-") + w);
    return v;
  }();
  return names;
}

Scenario scenario_from_preset(std::string_view preset) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : preset) {
    if (ch == '-') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  Scenario sc;
  if (!parts.empty() && lower(parts.back()) == "2cdc") {
    sc.cdc_count = 2;
    parts.pop_back();
  }
  const auto bad = [&] { return ConfigError("unknown preset '" + std::string(preset) + "'"); };
  if (parts.empty()) throw bad();
  const std::string family = lower(parts[0]);
  auto channel = [&](const std::string& s) {
    const auto c = chan::canonical_channel_name(s);
    if (!c) throw bad();
    return *c;
  };
  if (family == "calnex") {
    sc.family = "calnex";
    sc.wireless = "80211";
    sc.cdc_count = 2;
    if (parts.size() == 1) return sc;
    if (parts.size() == 2 && lower(parts[1]) == "ethernet") {
      sc.family = "calnex-ethernet";
      sc.cdc_count = 0;
      return sc;
    }
    if (parts.size() == 2) {
      sc.channel = channel(parts[1]);
      return sc;
    }
    throw bad();
  }
  if (family == "emulator" || family == "ota") {
    sc.family = family;
    if (parts.size() < 2 || parts.size() > 3) throw bad();
    sc.wireless = lower(parts[1]);
    if (sc.wireless != "80211" && sc.wireless != "wsharp" && sc.wireless != "ftm") throw bad();
    if (family == "ota") {
      sc.channel = parts.size() == 3 ? channel(parts[2]) : "IWLAN_A";
      sc.distance_m = 10.0;
      sc.speed_kmh = 0.0;
    } else {
      if (parts.size() != 3) throw bad();
      sc.channel = channel(parts[2]);
    }
    return sc;
  }
  throw bad();
}

Topology build_topology(const Scenario& sc) {
  Topology t;
  if (sc.burst_length < 1) throw ConfigError("burst_length must be >= 1");
  if (!(sc.distance_m >= 0.0)) throw ConfigError("distance_m must be >= 0");
  const cdc::CdcConfig to_wireless{32.0, 6.25};
  const cdc::CdcConfig from_wireless{32.0, 8.0};

  if (sc.family == "calnex" || sc.family == "calnex-ethernet") {
    t.name = sc.family == "calnex" ? "calnex-" + lower(sc.channel) : "calnex-ethernet";
    t.nodes = {make_node("gmc", Role::gmc, 0.0), make_node("tr_ap", Role::translator, 4000.0),
               make_node("tr_sta", Role::translator, -2500.0),
               make_node("analyzer", Role::sta, 1800.0)};
    t.hops.push_back(ethernet_hop("gmc", "tr_ap", 0.2));
    if (sc.family == "calnex") {
      t.hops.push_back(wireless_hop(sc, "tr_ap", "tr_sta", {1.0, 0.0}, 0.0));
      t.cdc_stages = {{"tr_ap", to_wireless}, {"tr_sta", from_wireless}};
    } else {
      t.hops.push_back(ethernet_hop("tr_ap", "tr_sta", 0.3));
    }
    t.hops.push_back(ethernet_hop("tr_sta", "analyzer", 0.4));
    t.dut = "analyzer";
    return t;
  }

  if (sc.family != "emulator" && sc.family != "ota")
    throw ConfigError("unknown scenario family '" + sc.family + "'");
  if (sc.cdc_count < 0 || sc.cdc_count > 2) throw ConfigError("cdc_count must be 0, 1 or 2");
  const bool ota = sc.family == "ota";
  t.name = sc.family + "-" + sc.wireless + "-" + lower(sc.channel);
  t.nodes = {make_node("gmc", Role::gmc, 0.0), make_node("switch", Role::boundary, 3000.0),
             make_node("translator", Role::translator, -7000.0),
             make_node("sta", Role::sta, 12000.0)};
  t.hops.push_back(ethernet_hop("gmc", "switch", 0.2));
  t.hops.push_back(ethernet_hop("switch", "translator", 0.3));
  const chan::LinkGeometry geom{sc.distance_m, ota ? 0.0 : kEmulatorBaseDelayNs};
  t.hops.push_back(wireless_hop(sc, "translator", "sta", geom, ota ? 0.0 : kEmulatorBaseDelayNs));
  if (sc.cdc_count >= 1) t.cdc_stages.push_back({"translator", to_wireless});
  if (sc.cdc_count >= 2) t.cdc_stages.push_back({"sta", from_wireless});
  if (ota) {
    t.nodes.push_back(make_node("reference", Role::reference, -900.0));
    t.hops.push_back(ethernet_hop("switch", "reference", 0.4, 10.0));
  }
  t.dut = "sta";
  return t;
}

}  // namespace hybridsync::sim
