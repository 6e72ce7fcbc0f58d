"""Day-ahead energy management for a railway station with EV charging."""
import json

from ._core import (
    DomainError,
    Error,
    InfeasibleInputError,
    InternalConsistencyError,
    ParseError,
    SchemaError,
    config_json,
    export_mps,
    flex_bounds,
    oracle,
    pv_power,
    run_json,
    solve_mps,
)


def load_config(path):
    """Configuration as a dict, defaults expanded and series inline."""
    return json.loads(config_json(str(path)))


def run(config, mode="A", seed=None, scenarios="", threads=0, out_dir=None):
    """Solve every selected scenario and return the report as a dict."""
    text = run_json(str(config), mode, seed, scenarios, threads, None if out_dir is None else str(out_dir))
    return json.loads(text)


__all__ = [
    "DomainError",
    "Error",
    "InfeasibleInputError",
    "InternalConsistencyError",
    "ParseError",
    "SchemaError",
    "export_mps",
    "flex_bounds",
    "load_config",
    "oracle",
    "pv_power",
    "run",
    "solve_mps",
]
