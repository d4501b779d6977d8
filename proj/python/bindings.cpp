// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hybridsync/budget.hpp"
#include "hybridsync/cdcmodel.hpp"
#include "hybridsync/cli.hpp"
#include "hybridsync/clockcore.hpp"
#include "hybridsync/config.hpp"
#include "hybridsync/error.hpp"
#include "hybridsync/simeng.hpp"
#include "hybridsync/syncproto.hpp"
#include "hybridsync/wirelesschan.hpp"

namespace py = pybind11;
using namespace hybridsync;

namespace {

py::dict stats_dict(const sim::RunStats& s) {
  py::dict d;
  d["mu_ns"] = s.mu_ns;
  d["sigma_ns"] = s.sigma_ns;
  d["mu_plus_3sigma_ns"] = s.mu_plus_3sigma_ns;
  d["min_ns"] = s.min_ns;
  d["max_ns"] = s.max_ns;
  d["max_abs_ns"] = s.max_abs_ns();
  d["n_samples"] = s.n_samples;
  return d;
}

// Experiment documents cross the boundary as JSON text.
py::dict simulate(const std::string& doc_json) {
  const auto cfg = config::parse_experiment(config::json::parse(doc_json));
  sim::ExperimentResult res;
  {
    py::gil_scoped_release release;
    res = sim::run_experiment(cfg);
  }
  py::dict out = stats_dict(res.stats);
  out["budget_ns"] = res.budget_ns;
  out["converged"] = res.converged;
  out["config_digest"] = config::digest(config::experiment_to_json(cfg));
  py::list per, errors;
  for (std::size_t r = 0; r < res.replicas.size(); ++r) {
    per.append(stats_dict(res.stats.per_replica[r]));
    errors.append(res.replicas[r].pps_error_ns);
  }
  out["per_replica"] = per;
  out["pps_error_ns"] = errors;
  return out;
}

}  // namespace

PYBIND11_MODULE(_hybridsync, m) {
  m.doc() = "Synchronization budgets and simulation for hybrid wired/wireless TSN";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_RuntimeError);

  m.def("hop_max_error", [](const std::string& kind, double ts_ns, double max_excess_ns,
                            double t_ms_ns, double t_src_ns) {
    budget::HopBudget h{budget::hop_kind_from_string(kind), ts_ns, max_excess_ns, t_ms_ns, t_src_ns, {}};
    return budget::hop_max_error(h);
  }, py::arg("kind"), py::arg("ts_ns") = 0.0, py::arg("max_excess_ns") = 0.0,
     py::arg("t_ms_ns") = 0.0, py::arg("t_src_ns") = 0.0);

  m.def("wireless_link_budget", [](const std::string& channel, const std::string& scheme,
                                   double ts_ns, double t_ms_ns) {
    return budget::wireless_link_budget(chan::build_pdp(channel), proto::scheme_from_string(scheme),
                                        ts_ns, t_ms_ns);
  }, py::arg("channel"), py::arg("scheme"), py::arg("ts_ns") = 50.0, py::arg("t_ms_ns") = 0.0);

  m.def("preset_budget", [](const std::string& preset) {
    return config::budget_report(sim::topology_budget(
        sim::build_topology(sim::scenario_from_preset(preset)))).dump();
  }, py::arg("preset"), "Budget report of a preset as JSON text");

  m.def("preset_names", &sim::preset_names);
  m.def("catalog_names", &chan::catalog_names);

  m.def("build_pdp", [](const std::string& name) {
    const auto pdp = chan::build_pdp(name);
    py::list taps;
    for (const auto& t : pdp.taps) taps.append(py::make_tuple(t.delay_ns, t.power_db));
    py::dict d;
    d["name"] = pdp.name;
    d["taps"] = taps;
    d["rms_delay_spread_ns"] = chan::rms_delay_spread(pdp);
    d["max_excess_delay_ns"] = pdp.max_excess_delay_ns;
    return d;
  }, py::arg("name"));

  m.def("doppler_from_speed", &chan::doppler_from_speed, py::arg("speed_kmh"),
        py::arg("carrier_hz") = 2.4e9);

  m.def("quantize_timestamp", [](double t, double ts, double phase) {
    return clock::quantize_timestamp(t, ts, phase).value_ns;
  }, py::arg("clock_time_ns"), py::arg("sample_period_ns"), py::arg("phase") = 0.0);

  m.def("translate_time", [](double src, long long n, double t_src, double t_dst, double rho) {
    cdc::CdcConfig c{t_src, t_dst, rho, 0.0, 0.0};
    const auto tr = cdc::translate_time(c, src, n);
    return py::make_tuple(tr.dst_read_ns, tr.delta_phc_ns);
  }, py::arg("src_time_ns"), py::arg("dst_sample_index"), py::arg("t_src_ns") = 32.0,
     py::arg("t_dst_ns") = 6.25, py::arg("rho_dst_ppm") = 0.0);

  m.def("estimate_offset", [](double t1, double t2, std::optional<double> t3,
                              std::optional<double> t4, const std::string& scheme,
                              double calibrated_delay_ns) {
    proto::SyncSample s{t1, t2, t3, t4, proto::scheme_from_string(scheme)};
    proto::ProtocolConfig p;
    p.scheme = s.scheme;
    p.calibrated_delay_ns = calibrated_delay_ns;
    return proto::estimate_offset(s, p);
  }, py::arg("t1"), py::arg("t2"), py::arg("t3") = py::none(), py::arg("t4") = py::none(),
     py::arg("scheme") = "two_way", py::arg("calibrated_delay_ns") = 0.0);

  m.def("validate_channel", [](const std::string& name, double speed_kmh, std::uint64_t seed) {
    cli::ChannelCheckOptions opt;
    opt.speed_kmh = speed_kmh;
    opt.seed = seed;
    const auto targets = chan::catalog_targets(name);
    if (!targets) throw ConfigError("unknown channel '" + name + "'");
    const auto rep = cli::validate_channel(chan::build_pdp(name), std::nullopt,
                                           targets->rms_delay_spread_ns,
                                           targets->max_excess_delay_ns, opt);
    return cli::channel_report_json(rep).dump();
  }, py::arg("name"), py::arg("speed_kmh") = 10.0, py::arg("seed") = 1);

  m.def("simulate_json", &simulate, py::arg("config_json"));

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "hybridsync");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
