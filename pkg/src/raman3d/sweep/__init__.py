"""Sweeps, canonical reproductions, oracle reports and the command-line interface."""

from .cache import ResultCache, params_hash
from .config import BaseCell, SweepSpec, load_config, spec_from_dict
from .oracle import OracleSpec, run_oracle
from .reproduce import TARGETS, AnchorCheck, ReproductionResult, reproduce
from .runner import run_sweep, rows_to_csv, sweep_columns

__all__ = [
    "AnchorCheck", "BaseCell", "OracleSpec", "ReproductionResult", "ResultCache", "SweepSpec", "TARGETS",
    "load_config", "params_hash", "reproduce", "rows_to_csv", "run_oracle", "run_sweep", "spec_from_dict",
    "sweep_columns",
]
