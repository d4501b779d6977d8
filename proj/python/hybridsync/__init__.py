"""Synchronization budgets and simulation for hybrid wired/wireless TSN."""

import json

from ._hybridsync import (
    ConfigError,
    ValidationError,
    build_pdp,
    catalog_names,
    doppler_from_speed,
    estimate_offset,
    hop_max_error,
    preset_names,
    quantize_timestamp,
    run_cli,
    translate_time,
    wireless_link_budget,
)
from . import _hybridsync as _core

__all__ = [
    "ConfigError",
    "ValidationError",
    "build_pdp",
    "catalog_names",
    "doppler_from_speed",
    "estimate_offset",
    "hop_max_error",
    "preset_budget",
    "preset_names",
    "quantize_timestamp",
    "run_cli",
    "simulate",
    "translate_time",
    "validate_channel",
    "wireless_link_budget",
]


def preset_budget(preset):
    """Budget report {chain, per_hop_ns, total_ns} of a named preset."""
    return json.loads(_core.preset_budget(preset))


def validate_channel(name, speed_kmh=10.0, seed=1):
    return json.loads(_core.validate_channel(name, speed_kmh, seed))


def simulate(config=None, **kwargs):
    """Run an experiment described by a config dict (same keys as the CLI's
    JSON files); keyword arguments are merged on top."""
    doc = dict(config or {})
    doc.update(kwargs)
    return _core.simulate_json(json.dumps(doc))
