"""Quaternionic wave mechanics on a lattice: bindings over the C++ core."""

import json
import os
from pathlib import Path

from ._qqmlab import (
    ConfigError,
    Quaternion,
    check_identities,
    known_suites,
    ordered_cross,
    parse_config,
    potential_catalog,
    qcross,
)
from . import _qqmlab


def _scenario_dir():
    if "QQM_SCENARIO_DIR" in os.environ:
        return Path(os.environ["QQM_SCENARIO_DIR"])
    installed = Path(__file__).with_name("scenarios")
    if installed.is_dir():
        return installed
    # editable install: the package is served from the source tree
    return Path(__file__).resolve().parents[2] / "scenarios"


SCENARIO_DIR = _scenario_dir()


def scenario_text(name_or_path):
    """Config text for a bundled scenario name or a path to an .ini file."""
    p = Path(name_or_path)
    if p.suffix != ".ini":
        p = SCENARIO_DIR / f"{name_or_path}.ini"
    return p.read_text()


def run_scenario(name_or_text, resolution_scale=1):
    """Runs a bundled scenario, a file, or raw config text.

    Returns (report, meta, csv) with report and meta decoded from JSON.
    """
    text = name_or_text if "\n" in name_or_text else scenario_text(name_or_text)
    out = _qqmlab.run_scenario(text, resolution_scale)
    return json.loads(out["report"]), json.loads(out["meta"]), out["csv"]


def list_scenarios():
    return sorted(p.stem for p in SCENARIO_DIR.glob("*.ini"))


__all__ = [
    "ConfigError",
    "Quaternion",
    "check_identities",
    "known_suites",
    "list_scenarios",
    "ordered_cross",
    "parse_config",
    "potential_catalog",
    "qcross",
    "run_scenario",
    "scenario_text",
]
