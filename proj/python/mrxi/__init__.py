"""Magnetorelaxometry imaging: forward operators, phantoms and reconstructions.

Configs are plain dicts in the same JSON schema the command line tool reads.
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    Error,
    GeometryError,
    IoError,
    NumericError,
    add_noise,
    phantom,
    solve_bregman,
    solve_tikhonov,
    solve_tv_admm,
    ssim,
)

__all__ = [
    "ConfigError",
    "Error",
    "GeometryError",
    "IoError",
    "NumericError",
    "add_noise",
    "assemble",
    "default_config",
    "layout",
    "normalize_config",
    "phantom",
    "run_experiment",
    "solve_bregman",
    "solve_tikhonov",
    "solve_tv_admm",
    "ssim",
]


def _dump(config):
    return "" if config is None else _json.dumps(config)


def default_config():
    return _json.loads(_core.default_config())


def normalize_config(config):
    """Validates `config` and fills in every default."""
    return _json.loads(_core.normalize_config(_dump(config)))


def layout(config=None):
    return _json.loads(_core.layout(_dump(config)))


def assemble(config=None, grid="reconstruction"):
    """Forward operator matrix for the configured layout on one of its grids."""
    return _core.assemble(_dump(config), grid)


def run_experiment(config, write_artifacts=True):
    """Runs the whole pipeline and returns the best-alpha evaluation records."""
    return _json.loads(_core.run_experiment(_dump(config), write_artifacts))
