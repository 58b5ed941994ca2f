"""Two-particle Bohmian trajectories through a symmetric two-slit geometry."""

import json
import os

from ._bohm2p import (
    ConfigError,
    Error,
    Model,
    builtin_scenarios,
    check_suites,
    evaluate,
    integrate,
    joint_probability,
    ks_critical_value,
    normalization_constant,
    sample_initial,
    velocity,
    velocity_sum_x,
)
from . import _bohm2p

__all__ = [
    "ConfigError",
    "Error",
    "Model",
    "builtin_scenarios",
    "check_suites",
    "evaluate",
    "integrate",
    "joint_probability",
    "ks_critical_value",
    "normalization_constant",
    "run_checks",
    "run_scenario",
    "sample_initial",
    "velocity",
    "velocity_sum_x",
]


def run_scenario(config, out_dir=None, seed=None, threads=0, write_files=True):
    """Run a scenario and return its report as a dict.

    `config` is a path to a JSON file, a built-in scenario name, or a dict.
    """
    if isinstance(config, dict):
        source, is_text = json.dumps(config), True
    else:
        source, is_text = os.fspath(config), False
    if out_dir is not None:
        out_dir = os.fspath(out_dir)
    report = _bohm2p._run_scenario(source, is_text, out_dir, seed, threads, write_files)
    return json.loads(report)


def run_checks(suites=None, fast=False, seed=20240101):
    """Run the property suites on the default models and return the report."""
    return json.loads(_bohm2p._run_checks(suites, fast, seed))
