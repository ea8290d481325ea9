"""Full counting statistics for free fermions.

Configs are plain dicts with the same layout as the JSON files accepted by
the ``fcs`` command-line tool; results come back as dicts.
"""

import json

from ._fcs import (
    ConfigError,
    ContractError,
    FcsError,
    IntegrityError,
    __version__,
    determinant,
    schatten_norm,
)
from . import _fcs

__all__ = [
    "ConfigError",
    "ContractError",
    "FcsError",
    "IntegrityError",
    "__version__",
    "determinant",
    "normalize_config",
    "oracle_check",
    "run",
    "scan_csv",
    "schatten_norm",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run(config, threads=1, seed=0):
    """Full pipeline; returns the result document."""
    return json.loads(_fcs.run_json(_text(config), threads, seed))


def oracle_check(config, threads=1, seed=0):
    """Engine against the Fock-space brute force (dimension <= 14)."""
    return json.loads(_fcs.oracle_check_json(_text(config), threads, seed))


def scan_csv(config, name, threads=1):
    """CSV table for one configured scan."""
    return _fcs.scan_csv(_text(config), name, threads)


def normalize_config(config):
    """The config with every default filled in."""
    return json.loads(_fcs.normalize_config_json(_text(config)))
