// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hybridsync/error.hpp"

namespace hybridsync::config {

namespace {

// Strict object reader: every key must be consumed before finish().
class Reader {
 public:
  Reader(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!doc_.contains(key)) return fallback;
    return as<T>(raw(key), key);
  }

  template <class T>
  T need(const std::string& key) {
    if (!doc_.contains(key)) throw ConfigError(where_ + ": missing '" + key + "'");
    return as<T>(raw(key), key);
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
  }

 private:
  template <class T>
  T as(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type (" + v.dump() + ")");
    }
  }

  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> m{
      {"channel", "scenario.channel"},       {"scheme", "scenario.wireless"},
      {"wireless", "scenario.wireless"},     {"speed", "channel_speed_kmh"},
      {"speed_kmh", "channel_speed_kmh"},    {"distance_m", "scenario.distance_m"},
      {"cdc_count", "scenario.cdc_count"},   {"burst_length", "scenario.burst_length"},
      {"detector", "scenario.detector"}};
  return m;
}

std::vector<std::string> split_dots(std::string_view key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

std::string_view distribution_name(chan::FadingDistribution d) {
  return d == chan::FadingDistribution::rayleigh ? "rayleigh" : "rice";
}

std::string_view spectrum_name(chan::DopplerSpectrum s) {
  switch (s) {
    case chan::DopplerSpectrum::jakes: return "jakes";
    case chan::DopplerSpectrum::bell: return "bell";
    case chan::DopplerSpectrum::gaussian: return "gaussian";
  }
  return "?";
}

std::string_view detector_name(chan::DetectorPolicy::Kind k) {
  return k == chan::DetectorPolicy::Kind::strongest_tap ? "strongest_tap" : "first_above_threshold";
}

chan::DetectorPolicy::Kind detector_from(const std::string& s) {
  if (s == "strongest_tap") return chan::DetectorPolicy::Kind::strongest_tap;
  if (s == "first_above_threshold") return chan::DetectorPolicy::Kind::first_above_threshold;
  throw ConfigError("unknown detector '" + s + "'");
}

json pdp_to_json(const chan::PowerDelayProfile& pdp) {
  json taps = json::array();
  for (const auto& t : pdp.taps) taps.push_back({{"delay_ns", t.delay_ns}, {"power_db", t.power_db}});
  return {{"name", pdp.name}, {"taps", taps}};
}

chan::PowerDelayProfile parse_pdp(const json& doc, const std::string& where) {
  if (doc.is_string()) {
    const auto name = chan::canonical_channel_name(doc.get<std::string>());
    if (!name) throw ConfigError(where + ": unknown channel '" + doc.get<std::string>() + "'");
    return chan::build_pdp(*name);
  }
  Reader r(doc, where);
  const auto name = r.get<std::string>("name", "user");
  std::vector<chan::Tap> taps;
  const json& arr = r.raw("taps");
  if (!arr.is_array() || arr.empty()) throw ConfigError(where + ".taps: expected a non-empty array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader t(arr[i], where + ".taps." + std::to_string(i));
    taps.push_back({t.need<double>("delay_ns"), t.need<double>("power_db")});
    t.finish();
  }
  r.finish();
  return chan::make_pdp(name, std::move(taps));
}

proto::ProtocolConfig parse_protocol(const json& doc, const std::string& where) {
  Reader r(doc, where);
  proto::ProtocolConfig p;
  p.sync_period_s = r.get("sync_period_s", p.sync_period_s);
  if (r.has("scheme")) p.scheme = proto::scheme_from_string(r.need<std::string>("scheme"));
  p.burst_length = r.get("burst_length", p.burst_length);
  p.calibrated_delay_ns = r.get("calibrated_delay_ns", p.calibrated_delay_ns);
  p.kp = r.get("kp", p.kp);
  p.ki = r.get("ki", p.ki);
  p.reply_delay_s = r.get("reply_delay_s", p.reply_delay_s);
  p.burst_spacing_s = r.get("burst_spacing_s", p.burst_spacing_s);
  r.finish();
  return p;
}

json protocol_to_json(const proto::ProtocolConfig& p) {
  return {{"sync_period_s", p.sync_period_s},
          {"scheme", proto::to_string(p.scheme)},
          {"burst_length", p.burst_length},
          {"calibrated_delay_ns", p.calibrated_delay_ns},
          {"kp", p.kp},
          {"ki", p.ki},
          {"reply_delay_s", p.reply_delay_s},
          {"burst_spacing_s", p.burst_spacing_s}};
}

clock::ClockModel parse_clock(const json& doc, const std::string& where) {
  Reader r(doc, where);
  clock::ClockModel c;
  c.offset_ns = r.get("offset_ns", c.offset_ns);
  c.drift_ppm = r.get("drift_ppm", c.drift_ppm);
  c.phase = r.get("phase", c.phase);
  c.sample_period_ns = r.get("sample_period_ns", c.sample_period_ns);
  c.drift_walk_sigma_ppm_per_s = r.get("drift_walk_sigma_ppm_per_s", c.drift_walk_sigma_ppm_per_s);
  r.finish();
  return c;
}

cdc::CdcConfig parse_cdc(Reader& r) {
  cdc::CdcConfig c;
  c.t_src_ns = r.get("t_src_ns", c.t_src_ns);
  c.t_dst_ns = r.get("t_dst_ns", c.t_dst_ns);
  c.rho_dst_ppm = r.get("rho_dst_ppm", c.rho_dst_ppm);
  c.dst_phase = r.get("dst_phase", c.dst_phase);
  c.latency_ns = r.get("latency_ns", c.latency_ns);
  return c;
}

sim::Scenario parse_scenario(sim::Scenario sc, const json& doc) {
  Reader r(doc, "scenario");
  sc.family = r.get("family", sc.family);
  sc.wireless = r.get("wireless", sc.wireless);
  if (r.has("channel")) {
    const auto raw = r.need<std::string>("channel");
    const auto name = chan::canonical_channel_name(raw);
    if (!name) throw ConfigError("scenario.channel: unknown channel '" + raw + "'");
    sc.channel = *name;
  }
  sc.cdc_count = r.get("cdc_count", sc.cdc_count);
  sc.distance_m = r.get("distance_m", sc.distance_m);
  sc.speed_kmh = r.get("speed_kmh", sc.speed_kmh);
  sc.burst_length = r.get("burst_length", sc.burst_length);
  if (r.has("calibrated_delay_ns")) sc.calibrated_delay_ns = r.need<double>("calibrated_delay_ns");
  sc.detector = r.get("detector", sc.detector);
  sc.detector_threshold_db = r.get("detector_threshold_db", sc.detector_threshold_db);
  r.finish();
  return sc;
}

}  // namespace

std::string canonical_key(std::string_view key) {
  const auto it = aliases().find(std::string(key));
  return it == aliases().end() ? std::string(key) : it->second;
}

void apply_override(json& doc, std::string_view dotted_key, std::string_view value_text) {
  const std::string key = canonical_key(dotted_key);
  const auto parts = split_dots(key);
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("malformed override key '" + std::string(dotted_key) + "'");
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = std::string(value_text);
  }
  json* cur = &doc;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    if (cur->is_array()) {
      if (!is_index(parts[i]) || std::stoul(parts[i]) >= cur->size())
        throw ConfigError("override '" + key + "': bad array index '" + parts[i] + "'");
      cur = &(*cur)[std::stoul(parts[i])];
    } else {
      if (cur->is_null()) *cur = json::object();
      if (!cur->is_object()) throw ConfigError("override '" + key + "': '" + parts[i - 1] + "' is not an object");
      cur = &(*cur)[parts[i]];
    }
    if (last) *cur = value;
  }
}

std::string digest(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json fading_to_json(const chan::FadingConfig& f) {
  return {{"distribution", distribution_name(f.distribution)},
          {"rice_k_db", f.rice_k_db},
          {"doppler_hz", f.doppler_hz},
          {"spectrum", spectrum_name(f.spectrum)},
          {"carrier_hz", f.carrier_hz}};
}

chan::FadingConfig parse_fading(const json& doc) {
  Reader r(doc, "fading");
  chan::FadingConfig f;
  const auto dist = r.get<std::string>("distribution", "rayleigh");
  if (dist == "rayleigh") f.distribution = chan::FadingDistribution::rayleigh;
  else if (dist == "rice") f.distribution = chan::FadingDistribution::rice;
  else throw ConfigError("fading.distribution: unknown '" + dist + "'");
  const auto spec = r.get<std::string>("spectrum", "jakes");
  if (spec == "jakes") f.spectrum = chan::DopplerSpectrum::jakes;
  else if (spec == "bell") f.spectrum = chan::DopplerSpectrum::bell;
  else if (spec == "gaussian") f.spectrum = chan::DopplerSpectrum::gaussian;
  else throw ConfigError("fading.spectrum: unknown '" + spec + "'");
  f.rice_k_db = r.get("rice_k_db", f.rice_k_db);
  f.doppler_hz = r.get("doppler_hz", f.doppler_hz);
  f.carrier_hz = r.get("carrier_hz", f.carrier_hz);
  r.finish();
  f.validate();
  return f;
}

UserChannel parse_channel(const json& doc) {
  Reader r(doc, "channel");
  UserChannel ch;
  if (r.has("schema") && r.need<std::string>("schema") != kChannelSchema)
    throw ConfigError("channel: unsupported schema");
  json pdp_doc = json::object();
  pdp_doc["name"] = r.get<std::string>("name", "user");
  pdp_doc["taps"] = r.raw("taps");
  ch.pdp = parse_pdp(pdp_doc, "channel");
  if (r.has("fading")) ch.fading = parse_fading(r.raw("fading"));
  if (r.has("rms_delay_spread_ns")) ch.declared_rms_ns = r.need<double>("rms_delay_spread_ns");
  if (r.has("max_excess_delay_ns")) ch.declared_max_excess_ns = r.need<double>("max_excess_delay_ns");
  r.finish();
  return ch;
}

json topology_to_json(const sim::Topology& topo) {
  json nodes = json::array();
  for (const auto& n : topo.nodes) {
    nodes.push_back({{"id", n.id},
                     {"role", sim::to_string(n.role)},
                     {"clock",
                      {{"offset_ns", n.clock.offset_ns},
                       {"drift_ppm", n.clock.drift_ppm},
                       {"phase", n.clock.phase},
                       {"sample_period_ns", n.clock.sample_period_ns},
                       {"drift_walk_sigma_ppm_per_s", n.clock.drift_walk_sigma_ppm_per_s}}},
                     {"resolution_ns", n.resolution_ns},
                     {"servo",
                      {{"anti_windup_ppm", n.servo.anti_windup_ppm},
                       {"integrator_ppm", n.servo.integrator_ppm}}}});
  }
  json hops = json::array();
  for (const auto& h : topo.hops) {
    json j = {{"from", h.from},
              {"to", h.to},
              {"medium", sim::to_string(h.medium)},
              {"geometry",
               {{"distance_m", h.geometry.distance_m}, {"base_delay_ns", h.geometry.base_delay_ns}}},
              {"protocol", protocol_to_json(h.protocol)},
              {"port_period_ns", h.port_period_ns},
              {"start_offset_s", h.start_offset_s}};
    if (h.medium == sim::Medium::wireless) {
      if (h.pdp) j["channel"] = pdp_to_json(*h.pdp);
      j["fading"] = fading_to_json(h.fading);
      j["detector"] = {{"kind", detector_name(h.detector.kind)},
                       {"threshold_db", h.detector.threshold_db}};
    }
    hops.push_back(std::move(j));
  }
  json stages = json::array();
  for (const auto& s : topo.cdc_stages) {
    stages.push_back({{"node_id", s.node_id},
                      {"t_src_ns", s.config.t_src_ns},
                      {"t_dst_ns", s.config.t_dst_ns},
                      {"rho_dst_ppm", s.config.rho_dst_ppm},
                      {"dst_phase", s.config.dst_phase},
                      {"latency_ns", s.config.latency_ns}});
  }
  return {{"name", topo.name}, {"dut", topo.dut}, {"nodes", nodes}, {"hops", hops},
          {"cdc_stages", stages}};
}

sim::Topology parse_topology(const json& doc) {
  Reader r(doc, "topology");
  sim::Topology t;
  t.name = r.get<std::string>("name", "inline");
  t.dut = r.get<std::string>("dut", "");
  const json& nodes = r.raw("nodes");
  if (!nodes.is_array()) throw ConfigError("topology.nodes: expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "topology.nodes." + std::to_string(i);
    Reader n(nodes[i], where);
    sim::NodeSpec spec;
    spec.id = n.need<std::string>("id");
    spec.role = sim::role_from_string(n.need<std::string>("role"));
    if (n.has("clock")) spec.clock = parse_clock(n.raw("clock"), where + ".clock");
    spec.resolution_ns = n.get("resolution_ns", spec.resolution_ns);
    if (n.has("servo")) {
      Reader s(n.raw("servo"), where + ".servo");
      spec.servo.anti_windup_ppm = s.get("anti_windup_ppm", spec.servo.anti_windup_ppm);
      spec.servo.integrator_ppm = s.get("integrator_ppm", spec.servo.integrator_ppm);
      s.finish();
    }
    n.finish();
    t.nodes.push_back(std::move(spec));
  }
  const json& hops = r.raw("hops");
  if (!hops.is_array()) throw ConfigError("topology.hops: expected an array");
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const std::string where = "topology.hops." + std::to_string(i);
    Reader h(hops[i], where);
    sim::HopSpec spec;
    spec.from = h.need<std::string>("from");
    spec.to = h.need<std::string>("to");
    spec.medium = sim::medium_from_string(h.need<std::string>("medium"));
    if (h.has("geometry")) {
      Reader g(h.raw("geometry"), where + ".geometry");
      spec.geometry.distance_m = g.get("distance_m", 0.0);
      spec.geometry.base_delay_ns = g.get("base_delay_ns", 0.0);
      g.finish();
    }
    if (h.has("protocol")) spec.protocol = parse_protocol(h.raw("protocol"), where + ".protocol");
    spec.port_period_ns = h.get("port_period_ns", spec.medium == sim::Medium::ethernet
                                                      ? sim::kEthernetSamplePeriodNs
                                                      : sim::kWirelessSamplePeriodNs);
    spec.start_offset_s = h.get("start_offset_s", spec.start_offset_s);
    if (h.has("channel")) spec.pdp = parse_pdp(h.raw("channel"), where + ".channel");
    if (h.has("fading")) spec.fading = parse_fading(h.raw("fading"));
    if (h.has("detector")) {
      Reader d(h.raw("detector"), where + ".detector");
      spec.detector.kind = detector_from(d.get<std::string>("kind", "strongest_tap"));
      spec.detector.threshold_db = d.get("threshold_db", spec.detector.threshold_db);
      d.finish();
    }
    h.finish();
    t.hops.push_back(std::move(spec));
  }
  if (r.has("cdc_stages")) {
    const json& stages = r.raw("cdc_stages");
    if (!stages.is_array()) throw ConfigError("topology.cdc_stages: expected an array");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      Reader s(stages[i], "topology.cdc_stages." + std::to_string(i));
      sim::CdcStage stage;
      stage.node_id = s.need<std::string>("node_id");
      stage.config = parse_cdc(s);
      s.finish();
      t.cdc_stages.push_back(std::move(stage));
    }
  }
  r.finish();
  t.validate();
  return t;
}

sim::ExperimentConfig parse_experiment(const json& doc) {
  Reader r(doc, "config");
  if (r.has("schema") && r.need<std::string>("schema") != kExperimentSchema)
    throw ConfigError("config: unsupported schema (expected " + std::string(kExperimentSchema) + ")");
  sim::ExperimentConfig cfg;
  const bool has_preset = r.has("preset");
  const bool has_topology = r.has("topology");
  if (has_preset == has_topology) throw ConfigError("config: give exactly one of 'preset' or 'topology'");
  if (has_preset) {
    sim::Scenario sc = sim::scenario_from_preset(r.need<std::string>("preset"));
    if (r.has("scenario")) sc = parse_scenario(sc, r.raw("scenario"));
    cfg.topology = sim::build_topology(sc);
  } else {
    if (r.has("scenario")) throw ConfigError("config: 'scenario' needs a 'preset'");
    cfg.topology = parse_topology(r.raw("topology"));
  }
  cfg.duration_s = r.get("duration_s", cfg.duration_s);
  cfg.warmup_s = r.get("warmup_s", cfg.warmup_s);
  cfg.pps_interval_s = r.get("pps_interval_s", cfg.pps_interval_s);
  cfg.replicas = r.get("replicas", cfg.replicas);
  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("config.seed: expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (r.has("channel_speed_kmh") && !r.raw("channel_speed_kmh").is_null())
    cfg.channel_speed_kmh = r.need<double>("channel_speed_kmh");
  cfg.drift_range_ppm = r.get("drift_range_ppm", cfg.drift_range_ppm);
  cfg.randomize_phases = r.get("randomize_phases", cfg.randomize_phases);
  cfg.threads = r.get("threads", cfg.threads);
  r.finish();
  cfg.validate();
  return cfg;
}

json experiment_to_json(const sim::ExperimentConfig& cfg) {
  json j = {{"schema", kExperimentSchema},
            {"topology", topology_to_json(cfg.topology)},
            {"duration_s", cfg.duration_s},
            {"warmup_s", cfg.warmup_s},
            {"pps_interval_s", cfg.pps_interval_s},
            {"replicas", cfg.replicas},
            {"seed", cfg.seed},
            {"drift_range_ppm", cfg.drift_range_ppm},
            {"randomize_phases", cfg.randomize_phases}};
  j["channel_speed_kmh"] = cfg.channel_speed_kmh ? json(*cfg.channel_speed_kmh) : json(nullptr);
  return j;
}

std::vector<budget::HopBudget> parse_chain(const json& doc) {
  const json* hops = &doc;
  std::optional<Reader> top;
  if (doc.is_object()) {
    top.emplace(doc, "chain");
    if (top->has("schema") && top->need<std::string>("schema") != kChainSchema)
      throw ConfigError("chain: unsupported schema");
    if (!top->has("hops")) throw ConfigError("chain: missing 'hops'");
    hops = &top->raw("hops");
    top->finish();
  }
  if (!hops->is_array() || hops->empty()) throw ConfigError("chain: expected a non-empty hop array");
  std::vector<budget::HopBudget> out;
  for (std::size_t i = 0; i < hops->size(); ++i) {
    const std::string where = "hop " + std::to_string(i);
    try {
      Reader h((*hops)[i], where);
      budget::HopBudget b;
      b.kind = budget::hop_kind_from_string(h.need<std::string>("kind"));
      b.ts_ns = h.get("ts_ns", 0.0);
      b.max_excess_ns = h.get("max_excess_ns", 0.0);
      b.t_ms_ns = h.get("t_ms_ns", 0.0);
      b.t_src_ns = h.get("t_src_ns", 0.0);
      b.label = h.get<std::string>("label", "");
      h.finish();
      b.validate();
      if (b.kind != budget::HopKind::cdc && !(b.ts_ns > 0.0))
        throw ConfigError("ts_ns must be > 0");
      out.push_back(std::move(b));
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      throw ConfigError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
  }
  return out;
}

json budget_report(const std::vector<budget::HopBudget>& chain) {
  json hops = json::array();
  json per = json::array();
  for (const auto& h : chain) {
    hops.push_back({{"kind", budget::to_string(h.kind)},
                    {"label", h.label},
                    {"ts_ns", h.ts_ns},
                    {"max_excess_ns", h.max_excess_ns},
                    {"t_ms_ns", h.t_ms_ns},
                    {"t_src_ns", h.t_src_ns}});
    per.push_back(budget::hop_max_error(h));
  }
  return {{"chain", hops}, {"per_hop_ns", per}, {"total_ns", budget::chain_max_error(chain)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace hybridsync::config
