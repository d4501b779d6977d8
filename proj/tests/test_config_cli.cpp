// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "hybridsync/cli.hpp"
#include "hybridsync/config.hpp"
#include "hybridsync/error.hpp"
#include "test_util.hpp"

using namespace hybridsync;
using config::json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "hybridsync");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("dotted overrides") {
  json doc = {{"preset", "calnex"}, {"topology", {{"hops", json::array({{{"from", "a"}}})}}}};
  config::apply_override(doc, "scenario.channel", "WLAN_C");
  CHECK(doc["scenario"]["channel"] == "WLAN_C");
  config::apply_override(doc, "speed", "30");
  CHECK(doc["channel_speed_kmh"] == 30);
  config::apply_override(doc, "topology.hops.0.from", "\"b\"");
  CHECK(doc["topology"]["hops"][0]["from"] == "b");
  config::apply_override(doc, "randomize_phases", "false");
  CHECK(doc["randomize_phases"] == false);
  CHECK_THROWS_AS(config::apply_override(doc, "topology.hops.3.from", "x"), ConfigError);
  CHECK_THROWS_AS(config::apply_override(doc, "a..b", "x"), ConfigError);
}

TEST_CASE("experiment documents are strict") {
  CHECK_NOTHROW(config::parse_experiment({{"preset", "calnex"}}));
  CHECK_THROWS_AS(config::parse_experiment({{"preset", "calnex"}, {"durration_s", 5}}), ConfigError);
  CHECK_THROWS_AS(config::parse_experiment({{"preset", "calnex"}, {"scenario", {{"chanel", "AWGN"}}}}), ConfigError);
  CHECK_THROWS_AS(config::parse_experiment({{"preset", "calnex"}, {"duration_s", "long"}}), ConfigError);
  CHECK_THROWS_AS(config::parse_experiment({{"preset", "calnex"}, {"schema", "other/9"}}), ConfigError);
  CHECK_THROWS_AS(config::parse_experiment(json::object()), ConfigError);
  CHECK_THROWS_AS(config::parse_experiment({{"preset", "calnex"}, {"seed", -1}}), ConfigError);
}

TEST_CASE("resolved documents round-trip") {
  const auto cfg = config::parse_experiment(
      {{"preset", "emulator-wsharp-iwlanB"}, {"scenario", {{"cdc_count", 2}}}, {"seed", 9}});
  const json resolved = config::experiment_to_json(cfg);
  const auto again = config::parse_experiment(resolved);
  CHECK(config::experiment_to_json(again) == resolved);
  CHECK(config::digest(resolved) == config::digest(config::experiment_to_json(again)));
  CHECK(config::digest(resolved).size() == 16);
  auto other = cfg;
  other.seed = 10;
  CHECK(config::digest(config::experiment_to_json(other)) != config::digest(resolved));
  // Thread count never enters the digest.
  other = cfg;
  other.threads = 4;
  CHECK(config::digest(config::experiment_to_json(other)) == config::digest(resolved));
}

TEST_CASE("chain documents") {
  const json ok = {{"hops", {{{"kind", "ethernet"}, {"ts_ns", 8}}}}};
  CHECK(budget::chain_max_error(config::parse_chain(ok)) == 8.0);
  const json bad = json::array({{{"kind", "ethernet"}, {"ts_ns", 8}}, {{"kind", "cdc"}, {"ts_ns", 8}}});
  try {
    config::parse_chain(bad);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("hop 1") != std::string::npos);
  }
  const auto rep = config::budget_report(config::parse_chain(ok));
  CHECK(rep["total_ns"] == 8.0);
  CHECK(rep["per_hop_ns"].size() == 1);
}

TEST_CASE("user channel documents") {
  const json doc = {{"name", "two"},
                    {"taps", {{{"delay_ns", 0}, {"power_db", 0}}, {{"delay_ns", 100}, {"power_db", 0}}}},
                    {"fading", {{"distribution", "rayleigh"}, {"spectrum", "bell"}, {"doppler_hz", 30}}},
                    {"rms_delay_spread_ns", 50}};
  const auto ch = config::parse_channel(doc);
  CHECK(ch.pdp.taps.size() == 2);
  CHECK(ch.fading->spectrum == chan::DopplerSpectrum::bell);
  CHECK(*ch.declared_rms_ns == 50.0);
  json bad = doc;
  bad["colour"] = "red";
  CHECK_THROWS_AS(config::parse_channel(bad), ConfigError);
}

TEST_CASE("cli budget") {
  auto r = cli_run({"budget", "--preset", "calnex-awgn"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["total_ns"] == 73.0);
  r = cli_run({"budget", "--preset", "emulator-wsharp-iwlanB"});
  CHECK(json::parse(r.out)["per_hop_ns"][2] == 625.0);

  const auto dir = testutil::scratch_dir("budget");
  {
    std::ofstream f(dir / "chain.json");
    f << R"({"hops": [{"kind": "ethernet", "ts_ns": 8}]})";
  }
  r = cli_run({"budget", "--chain", (dir / "chain.json").string()});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["total_ns"] == 8.0);
  {
    std::ofstream f(dir / "bad.json");
    f << R"([{"kind": "ethernet", "ts_ns": 8}, {"kind": "wireless_two_way", "ts_ns": -50}])";
  }
  r = cli_run({"budget", "--chain", (dir / "bad.json").string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("hop 1") != std::string::npos);
}

TEST_CASE("cli simulate writes deterministic artifacts") {
  const auto a = testutil::scratch_dir("sim_a");
  const auto b = testutil::scratch_dir("sim_b");
  const std::vector<std::string> common{"simulate", "--preset", "calnex-awgn", "--seed", "4",
                                        "--set", "duration_s=1000", "--replicas", "2"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string(), "--threads", "1"});
  auto r = cli_run(args);
  REQUIRE(r.code == 0);
  args = common;
  args.insert(args.end(), {"--out", b.string(), "--threads", "2"});
  REQUIRE(cli_run(args).code == 0);

  const auto samples = testutil::slurp(a / "samples.csv");
  CHECK(samples.rfind("replica,sample_idx,true_time_s,pps_error_ns\n", 0) == 0);
  CHECK(count_lines(samples) == 1 + 2 * 900);
  CHECK(samples.find('\r') == std::string::npos);
  CHECK(samples == testutil::slurp(b / "samples.csv"));
  CHECK(testutil::slurp(a / "summary.json") == testutil::slurp(b / "summary.json"));

  const auto summary = json::parse(testutil::slurp(a / "summary.json"));
  for (const char* k : {"mu_ns", "sigma_ns", "mu_plus_3sigma_ns", "max_abs_ns", "budget_ns",
                        "config_digest", "seed"})
    CHECK(summary.contains(k));
  CHECK(summary["seed"] == 4);
  CHECK(summary["budget_ns"] == 73.0);
  CHECK(summary["config_digest"] == config::digest(summary["config"]));
}

TEST_CASE("cli seed fallback and formats") {
  const auto d = testutil::scratch_dir("seed_env");
  setenv("HYBRIDSYNC_SEED", "1234", 1);
  auto r = cli_run({"simulate", "--preset", "calnex-ethernet", "--set", "duration_s=60",
                    "--set", "warmup_s=40", "--out", d.string(), "--format", "json"});
  unsetenv("HYBRIDSYNC_SEED");
  REQUIRE(r.code == 0);
  CHECK(json::parse(testutil::slurp(d / "summary.json"))["seed"] == 1234);
  CHECK_FALSE(std::filesystem::exists(d / "samples.csv"));

  setenv("HYBRIDSYNC_SEED", "abc", 1);
  r = cli_run({"simulate", "--preset", "calnex-ethernet", "--out", d.string()});
  unsetenv("HYBRIDSYNC_SEED");
  CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("cli errors map to exit codes") {
  const auto d = testutil::scratch_dir("errors");
  CHECK(cli_run({"simulate", "--preset", "nope", "--out", d.string()}).code == cli::kExitConfig);
  CHECK(cli_run({"simulate", "--out", d.string()}).code == cli::kExitConfig);
  CHECK(cli_run({"simulate", "--preset", "calnex", "--set", "nokey=1", "--out", d.string()}).code ==
        cli::kExitConfig);
  CHECK(cli_run({"frobnicate"}).code == cli::kExitConfig);
  CHECK(cli_run({"sweep", "--preset", "calnex", "--param", "speed", "--out", d.string()}).code ==
        cli::kExitConfig);
  CHECK(cli_run({"sweep", "--preset", "calnex", "--param", "not.a.key", "--values", "1", "--out",
                 (d / "sweep").string()}).code == cli::kExitConfig);
  CHECK_FALSE(std::filesystem::exists(d / "sweep"));
  CHECK(cli_run({"validate-channel", "WLAN_Q"}).code == cli::kExitConfig);
}

TEST_CASE("cli sweep") {
  const auto d = testutil::scratch_dir("sweep");
  auto r = cli_run({"sweep", "--preset", "emulator-80211-awgn", "--param", "channel", "--values",
                    "AWGN,WLAN_C", "--replicas", "2", "--set", "duration_s=60", "--set", "warmup_s=10",
                    "--out", d.string()});
  REQUIRE(r.code == 0);
  const auto csv = testutil::slurp(d / "sweep.csv");
  CHECK(count_lines(csv) == 1 + 2 * 2);
  const auto trend = json::parse(testutil::slurp(d / "trend.json"));
  CHECK(trend["parameter"] == "scenario.channel");
  CHECK(trend["rows"].size() == 2);
  CHECK(trend["rows"][1]["budget_ns"] == 8 + 8 + 16 + 550.0);
}

TEST_CASE("cli validate-channel") {
  auto r = cli_run({"validate-channel", "AWGN"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["rms_delay_spread_ns"] == 0.0);

  r = cli_run({"validate-channel", "IWLAN_A"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["rms_delay_spread_ns"].get<double>() == doctest::Approx(29.0).epsilon(0.01));

  const auto d = testutil::scratch_dir("chan");
  {
    std::ofstream f(d / "mislabeled.json");
    f << R"({"name": "mine", "taps": [{"delay_ns": 0, "power_db": 0}, {"delay_ns": 100, "power_db": -3}],
             "rms_delay_spread_ns": 80})";
  }
  r = cli_run({"validate-channel", (d / "mislabeled.json").string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK(json::parse(r.out)["checks"]["rms_delay_spread"] == false);
}
