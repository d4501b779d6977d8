# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The hybridsync Authors

import json
import os
import subprocess

import pytest

import hybridsync as hs


def test_budgets():
    assert hs.hop_max_error("ethernet", ts_ns=8) == 8
    assert hs.hop_max_error("cdc", t_src_ns=32) == 16
    assert hs.wireless_link_budget("WLAN_C", "one_way") == 1075
    assert hs.wireless_link_budget("IWLAN_B", "two_way") == 325
    assert hs.preset_budget("calnex")["total_ns"] == 73
    assert hs.preset_budget("calnex-ethernet")["total_ns"] == 24


def test_catalog():
    assert set(hs.catalog_names()) >= {"AWGN", "WLAN_A", "WLAN_C", "IWLAN_A", "IWLAN_B"}
    pdp = hs.build_pdp("WLAN_A")
    assert pdp["rms_delay_spread_ns"] == pytest.approx(50, rel=1e-2)
    assert pdp["max_excess_delay_ns"] == 390
    assert len(pdp["taps"]) <= 10
    assert hs.doppler_from_speed(10) == pytest.approx(22.24, abs=0.01)


def test_estimators_and_quantization():
    # forward-only asymmetry of 40 ns biases two-way by 20 ns
    assert hs.estimate_offset(0, 140, 1000, 1100) == pytest.approx(20)
    assert hs.estimate_offset(0, 1235, scheme="one_way", calibrated_delay_ns=1135) == 100
    assert hs.quantize_timestamp(12.0, 8.0) == 8.0
    assert hs.quantize_timestamp(13.0, 8.0) == 16.0
    read, delta = hs.translate_time(0.0, 3)
    assert abs(delta) <= 16


def test_errors_map_to_python():
    with pytest.raises(hs.ConfigError):
        hs.build_pdp("NOPE")
    with pytest.raises(ValueError):
        hs.preset_budget("nope")


def test_simulate_deterministic():
    cfg = {"preset": "calnex-awgn", "duration_s": 40, "warmup_s": 20, "replicas": 2, "seed": 5}
    a = hs.simulate(cfg)
    b = hs.simulate(cfg, threads=2)
    assert a["pps_error_ns"] == b["pps_error_ns"]
    assert a["n_samples"] == 40
    assert a["budget_ns"] == 73


def test_validate_channel():
    rep = hs.validate_channel("IWLAN_A")
    assert rep["passed"]


def test_run_cli():
    code, out, _ = hs.run_cli(["budget", "--preset", "calnex"])
    assert code == 0
    assert json.loads(out)["total_ns"] == 73
    code, _, err = hs.run_cli(["budget", "--preset", "nope"])
    assert code == 2 and err


@pytest.mark.skipif("HYBRIDSYNC_CLI" not in os.environ, reason="CLI binary not given")
def test_cli_binary(tmp_path):
    cli = os.environ["HYBRIDSYNC_CLI"]
    r = subprocess.run([cli, "simulate", "--preset", "calnex-ethernet", "--set", "duration_s=60",
                        "--set", "warmup_s=40", "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["converged"]
    rows = (tmp_path / "samples.csv").read_text().splitlines()
    assert len(rows) == 1 + 20
