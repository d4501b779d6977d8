// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hybridsync/budget.hpp"
#include "hybridsync/error.hpp"
#include "hybridsync/stats.hpp"

namespace hybridsync::cli {

using config::json;
using ojson = nlohmann::ordered_json;

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ------------------------------------------------------ channel validation

ChannelReport validate_channel(const chan::PowerDelayProfile& pdp,
                               std::optional<chan::FadingConfig> fading,
                               std::optional<double> expected_rms_ns,
                               std::optional<double> expected_max_excess_ns,
                               const ChannelCheckOptions& opt) {
  ChannelReport rep;
  rep.name = pdp.name;
  rep.rms_delay_spread_ns = chan::rms_delay_spread(pdp);
  rep.max_excess_delay_ns = pdp.max_excess_delay_ns;
  rep.expected_rms_ns = expected_rms_ns;
  rep.expected_max_excess_ns = expected_max_excess_ns;
  auto close = [&](double got, std::optional<double> want) {
    return !want || std::abs(got - *want) <= opt.rel_tolerance * std::abs(*want) + 1e-9;
  };
  rep.rms_ok = close(rep.rms_delay_spread_ns, expected_rms_ns);
  rep.max_excess_ok = close(rep.max_excess_delay_ns, expected_max_excess_ns);

  const bool explicit_fading = fading.has_value();
  chan::FadingConfig f = fading.value_or(chan::FadingConfig{});
  if (!explicit_fading) f.doppler_hz = chan::doppler_from_speed(opt.speed_kmh, f.carrier_hz);
  f.validate();
  rep.doppler_hz = f.doppler_hz;
  if ((pdp.taps.size() < 2 && !explicit_fading) || f.doppler_hz == 0.0) return rep;

  // Taps carrying a line-of-sight component are not Rayleigh.
  std::vector<std::size_t> taps;
  for (std::size_t k = 0; k < pdp.taps.size(); ++k)
    if (!(k == 0 && f.distribution == chan::FadingDistribution::rice)) taps.push_back(k);
  if (taps.empty()) return rep;

  chan::FadingProcess proc(pdp, f, opt.seed);
  std::vector<double> env;
  for (std::size_t k : taps)
    for (int i = 0; i < opt.ks_samples_per_tap; ++i)
      env.push_back(std::abs(proc.unit_gain(k, TrueTime::from_s(opt.ks_spacing_s * (i + 1)))));
  const auto ks = stats::ks_test(env, [](double r) { return r <= 0.0 ? 0.0 : 1.0 - std::exp(-r * r); });
  rep.ks_p_value = ks.p_value;
  rep.ks_ok = ks.p_value >= opt.ks_alpha;

  const auto m = static_cast<std::size_t>(std::llround(opt.acf_record_s / opt.acf_step_s));
  const auto lags = static_cast<std::size_t>(std::llround(opt.acf_max_lag_s / opt.acf_step_s));
  std::vector<double> acf(lags + 1, 0.0);
  std::vector<std::complex<double>> h(m);
  for (std::size_t k : taps) {
    for (std::size_t i = 0; i < m; ++i)
      h[i] = proc.unit_gain(k, TrueTime::from_s(opt.acf_step_s * static_cast<double>(i)));
    std::vector<double> r(lags + 1, 0.0);
    for (std::size_t l = 0; l <= lags; ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i + l < m; ++i) s += (h[i + l] * std::conj(h[i])).real();
      r[l] = s / static_cast<double>(m - l);
    }
    for (std::size_t l = 0; l <= lags; ++l) acf[l] += r[l] / r[0] / static_cast<double>(taps.size());
  }
  double worst = 0.0;
  for (std::size_t l = 0; l <= lags; ++l) {
    const double tau = opt.acf_step_s * static_cast<double>(l);
    const double model = f.spectrum == chan::DopplerSpectrum::jakes
                             ? chan::jakes_autocorrelation(f.doppler_hz, tau)
                             : proc.model_autocorrelation(tau);
    worst = std::max(worst, std::abs(acf[l] - model));
  }
  rep.acf_max_abs_error = worst;
  rep.acf_ok = worst <= opt.acf_tolerance;
  return rep;
}

json channel_report_json(const ChannelReport& r) {
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  return {{"channel", r.name},
          {"rms_delay_spread_ns", r.rms_delay_spread_ns},
          {"max_excess_delay_ns", r.max_excess_delay_ns},
          {"expected_rms_delay_spread_ns", opt(r.expected_rms_ns)},
          {"expected_max_excess_delay_ns", opt(r.expected_max_excess_ns)},
          {"doppler_hz", r.doppler_hz},
          {"rayleigh_ks_p_value", opt(r.ks_p_value)},
          {"autocorrelation_max_abs_error", opt(r.acf_max_abs_error)},
          {"checks",
           {{"rms_delay_spread", r.rms_ok},
            {"max_excess_delay", r.max_excess_ok},
            {"rayleigh_ks", r.ks_ok},
            {"autocorrelation", r.acf_ok}}},
          {"passed", r.passed()}};
}

// ----------------------------------------------------------------- outputs

std::string samples_csv(const sim::ExperimentResult& result) {
  std::string s = "replica,sample_idx,true_time_s,pps_error_ns\n";
  for (std::size_t r = 0; r < result.replicas.size(); ++r) {
    const auto& rep = result.replicas[r];
    for (std::size_t i = 0; i < rep.pps_error_ns.size(); ++i) {
      s += std::to_string(r);
      s += ',';
      s += std::to_string(i);
      s += ',';
      s += format_number(rep.true_time_s[i]);
      s += ',';
      s += format_number(rep.pps_error_ns[i]);
      s += '\n';
    }
  }
  return s;
}

namespace {

ojson stats_json(const sim::RunStats& s) {
  return {{"mu_ns", s.mu_ns},
          {"sigma_ns", s.sigma_ns},
          {"mu_plus_3sigma_ns", s.mu_plus_3sigma_ns},
          {"max_abs_ns", s.max_abs_ns()},
          {"min_ns", s.min_ns},
          {"max_ns", s.max_ns},
          {"n_samples", s.n_samples}};
}

}  // namespace

std::string summary_json(const sim::ExperimentConfig& cfg, const sim::ExperimentResult& result) {
  const json resolved = config::experiment_to_json(cfg);
  ojson j = stats_json(result.stats);
  j["budget_ns"] = result.budget_ns;
  j["converged"] = result.converged;
  j["config_digest"] = config::digest(resolved);
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  ojson per = ojson::array();
  for (const auto& p : result.stats.per_replica) per.push_back(stats_json(p));
  j["per_replica"] = per;
  j["histogram"] = {{"edges", result.stats.histogram.edges}, {"counts", result.stats.histogram.counts}};
  j["config"] = ojson::parse(resolved.dump());
  return j.dump(2) + "\n";
}

// --------------------------------------------------------------- commands

namespace {

struct Common {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::string format = "both";
  std::uint64_t seed = 0;
  int replicas = 0;
  int threads = 0;
  std::vector<std::string> sets;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* replicas_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c, bool with_run_options) {
  sub->add_option("--config", c.config_path, "Experiment JSON file");
  sub->add_option("--preset", c.preset, "Topology preset name");
  sub->add_option("--set", c.sets, "Override a dotted key: key=value (repeatable)");
  c.out_opt = sub->add_option("--out", c.out_dir, "Output directory");
  sub->add_option("--format", c.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  if (!with_run_options) return;
  c.seed_opt = sub->add_option("--seed", c.seed, "Root seed (falls back to HYBRIDSYNC_SEED)");
  c.replicas_opt = sub->add_option("--replicas", c.replicas, "Number of replicas")
                       ->check(CLI::PositiveNumber);
  c.threads_opt = sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw ConfigError("HYBRIDSYNC_SEED is not an unsigned integer: '" + text + "'");
  return v;
}

json resolve_document(const Common& c) {
  json doc = c.config_path.empty() ? json::object() : config::read_json_file(c.config_path);
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (!c.preset.empty()) {
    doc["preset"] = c.preset;
    doc.erase("topology");
  }
  if (!doc.contains("preset") && !doc.contains("topology"))
    throw ConfigError("give --config or --preset");
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    config::apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed_opt && *c.seed_opt) {
    doc["seed"] = c.seed;
  } else if (!doc.contains("seed")) {
    if (const char* env = std::getenv("HYBRIDSYNC_SEED")) doc["seed"] = parse_seed(env);
  }
  if (c.replicas_opt && *c.replicas_opt) doc["replicas"] = c.replicas;
  if (c.threads_opt && *c.threads_opt) doc["threads"] = c.threads;
  return doc;
}

sim::ExperimentConfig resolve_config(const json& doc) {
  auto cfg = config::parse_experiment(doc);
  if (!doc.contains("threads")) {
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    cfg.threads = std::clamp(hw, 1, cfg.replicas);
  }
  return cfg;
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory '" + dir + "'");
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << body;
  f.close();
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

bool wants_csv(const std::string& format) { return format != "json"; }
bool wants_json(const std::string& format) { return format != "csv"; }

int cmd_budget(const Common& c, const std::string& chain_path, std::ostream& out) {
  std::vector<budget::HopBudget> chain;
  if (!chain_path.empty()) {
    chain = config::parse_chain(config::read_json_file(chain_path));
  } else {
    chain = sim::topology_budget(resolve_config(resolve_document(c)).topology);
  }
  const json report = config::budget_report(chain);
  std::string csv = "index,kind,label,max_error_ns\n";
  for (std::size_t i = 0; i < chain.size(); ++i)
    csv += std::to_string(i) + "," + std::string(budget::to_string(chain[i].kind)) + "," +
           chain[i].label + "," + format_number(report["per_hop_ns"][i].get<double>()) + "\n";
  csv += "total,,," + format_number(report["total_ns"].get<double>()) + "\n";
  if (c.format == "csv") out << csv;
  else out << report.dump(2) << "\n";
  if (c.out_opt && *c.out_opt) {
    const auto dir = prepare_out(c.out_dir);
    if (wants_json(c.format)) write_file(dir / "budget.json", report.dump(2) + "\n");
    if (wants_csv(c.format)) write_file(dir / "budget.csv", csv);
  }
  return kExitOk;
}

int cmd_simulate(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(resolve_document(c));
  const auto dir = prepare_out(c.out_dir);
  const auto result = sim::run_experiment(cfg);
  if (wants_csv(c.format)) write_file(dir / "samples.csv", samples_csv(result));
  if (wants_json(c.format)) write_file(dir / "summary.json", summary_json(cfg, result));
  out << "mu_ns=" << format_number(result.stats.mu_ns)
      << " sigma_ns=" << format_number(result.stats.sigma_ns)
      << " mu_plus_3sigma_ns=" << format_number(result.stats.mu_plus_3sigma_ns)
      << " max_abs_ns=" << format_number(result.stats.max_abs_ns())
      << " budget_ns=" << format_number(result.budget_ns)
      << " samples=" << result.stats.n_samples << "\n";
  if (!result.converged) {
    err << "servo did not converge: |error| exceeded 10x the chain budget after warmup\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& values,
              std::ostream& out, std::ostream& err) {
  if (param.empty()) throw ConfigError("sweep needs --param");
  if (values.empty()) throw ConfigError("sweep needs a non-empty --values list");
  const json base = resolve_document(c);
  // Resolve every point first so a bad key or value produces no output.
  std::vector<sim::ExperimentConfig> configs;
  for (const auto& v : values) {
    json doc = base;
    config::apply_override(doc, param, v);
    try {
      configs.push_back(resolve_config(doc));
    } catch (const ConfigError& e) {
      throw ConfigError("sweep " + param + "=" + v + ": " + e.what());
    }
  }
  const auto dir = prepare_out(c.out_dir);
  std::string csv = "value,replica,mu_ns,sigma_ns,mu_plus_3sigma_ns,max_abs_ns,n_samples\n";
  ojson rows = ojson::array();
  bool converged = true;
  std::vector<double> sigmas;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const auto result = sim::run_experiment(configs[k]);
    converged = converged && result.converged;
    for (std::size_t r = 0; r < result.stats.per_replica.size(); ++r) {
      const auto& s = result.stats.per_replica[r];
      csv += values[k] + "," + std::to_string(r) + "," + format_number(s.mu_ns) + "," +
             format_number(s.sigma_ns) + "," + format_number(s.mu_plus_3sigma_ns) + "," +
             format_number(s.max_abs_ns()) + "," + std::to_string(s.n_samples) + "\n";
    }
    ojson row = stats_json(result.stats);
    ojson value;
    try {
      value = ojson::parse(values[k]);
    } catch (const ojson::parse_error&) {
      value = values[k];
    }
    row["value"] = value;
    row["budget_ns"] = result.budget_ns;
    row["config_digest"] = config::digest(config::experiment_to_json(configs[k]));
    rows.push_back(row);
    sigmas.push_back(result.stats.sigma_ns);
    out << param << "=" << values[k] << " sigma_ns=" << format_number(result.stats.sigma_ns)
        << " mu_ns=" << format_number(result.stats.mu_ns) << "\n";
  }
  ojson trend = {{"parameter", config::canonical_key(param)},
                 {"rows", rows},
                 {"sigma_nondecreasing", std::is_sorted(sigmas.begin(), sigmas.end())},
                 {"converged", converged}};
  if (wants_csv(c.format)) write_file(dir / "sweep.csv", csv);
  if (wants_json(c.format)) write_file(dir / "trend.json", trend.dump(2) + "\n");
  if (!converged) {
    err << "servo did not converge for at least one sweep point\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_validate_channel(const Common& c, const std::string& channel, double speed_kmh,
                         std::uint64_t seed, std::ostream& out) {
  ChannelCheckOptions opt;
  opt.speed_kmh = speed_kmh;
  opt.seed = seed;
  ChannelReport rep;
  if (auto targets = chan::catalog_targets(channel)) {
    rep = validate_channel(chan::build_pdp(channel), std::nullopt, targets->rms_delay_spread_ns,
                           targets->max_excess_delay_ns, opt);
  } else if (std::filesystem::exists(channel)) {
    const auto user = config::parse_channel(config::read_json_file(channel));
    rep = validate_channel(user.pdp, user.fading, user.declared_rms_ns, user.declared_max_excess_ns, opt);
  } else {
    throw ConfigError("unknown channel '" + channel + "' (not a catalog name or a file)");
  }
  const json report = channel_report_json(rep);
  out << report.dump(2) << "\n";
  if (c.out_opt && *c.out_opt) write_file(prepare_out(c.out_dir) / "channel_report.json", report.dump(2) + "\n");
  return rep.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hybridsync: time synchronization budgets and simulation for wired/wireless TSN"};
  app.require_subcommand(1);

  Common budget_c, sim_c, sweep_c, chan_c;
  std::string chain_path;
  auto* budget_cmd = app.add_subcommand("budget", "Analytic worst-case error of a chain");
  add_common(budget_cmd, budget_c, false);
  budget_cmd->add_option("--chain", chain_path, "Chain JSON file");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo PPS error simulation");
  add_common(sim_cmd, sim_c, true);

  std::string param;
  std::vector<std::string> values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Simulate once per value of one parameter");
  add_common(sweep_cmd, sweep_c, true);
  sweep_cmd->add_option("--param", param, "Dotted key to sweep")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->delimiter(',');

  std::string channel;
  double speed_kmh = 10.0;
  std::uint64_t chan_seed = 1;
  auto* chan_cmd = app.add_subcommand("validate-channel", "Check a channel model");
  chan_cmd->add_option("channel", channel, "Catalog name or channel JSON file")->required();
  chan_cmd->add_option("--speed", speed_kmh, "Terminal speed in km/h")->check(CLI::NonNegativeNumber);
  chan_cmd->add_option("--seed", chan_seed, "Seed of the fading process");
  chan_c.out_opt = chan_cmd->add_option("--out", chan_c.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*budget_cmd) return cmd_budget(budget_c, chain_path, out);
    if (*sim_cmd) return cmd_simulate(sim_c, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_c, param, values, out, err);
    if (*chan_cmd) return cmd_validate_channel(chan_c, channel, speed_kmh, chan_seed, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitConfig;
}

}  // namespace hybridsync::cli
