"""Discrete-event TCP congestion-control lab."""

import json

from ._core import (
    Config,
    Result,
    box_whisker,
    cubic_k,
    empirical_cdf,
    format_relative,
    jain_fairness,
    representative_flow,
)
from . import _core

__all__ = [
    "Config",
    "Result",
    "run",
    "run_matrix",
    "stats",
    "summary",
    "aggregate",
    "box_whisker",
    "cubic_k",
    "empirical_cdf",
    "format_relative",
    "jain_fairness",
    "representative_flow",
]


def _as_config(cfg):
    if isinstance(cfg, Config):
        return cfg
    return Config.from_ini(cfg)


def run(config, keep_logs=False):
    """Run every configured replication. `config` is a Config or INI text."""
    return _core.run_experiment(_as_config(config), keep_logs)


def summary(result):
    return json.loads(result.summary_json())


def aggregate(result, mode="raw"):
    return json.loads(result.aggregate_json(mode))


def run_matrix(config, out_dir=None):
    return _core.run_matrix(_as_config(config), None if out_dir is None else str(out_dir))


def stats(run_dir, mode="raw"):
    """Recompute per-variant aggregates from a run directory."""
    return json.loads(_core.stats(str(run_dir), mode))
