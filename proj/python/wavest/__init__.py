"""Space-time finite element solvers for the 1D wave equation."""

import json
from pathlib import Path

from ._wavest import (
    ConfigError,
    ConvergenceError,
    DataError,
    NumericalError,
    Problem,
    Solution,
    energy,
    eoc,
    error_norms,
    methods,
    preset,
    presets,
    solve,
    sweep,
    table1,
    validate_config,
)
from . import _wavest

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "NumericalError",
    "Problem",
    "Solution",
    "energy",
    "eoc",
    "error_norms",
    "methods",
    "preset",
    "presets",
    "run",
    "solve",
    "sweep",
    "table1",
    "validate_config",
]


def run(config, quick=False, out=None):
    """Run an experiment config (path or dict) and return the parsed report."""
    if isinstance(config, dict):
        text = json.dumps(config)
    else:
        text = Path(config).read_text()
    return json.loads(_wavest.run_config(text, quick, None if out is None else str(out)))
