"""Experiment runner: config ingestion, sweeps, CSV output and reports."""

from .config import ExperimentConfig, parse_config, parse_config_file
from .sweep import SweepResult, SweepRow, run_experiment, read_sweep_csv
from .report import compare_report

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "parse_config_file",
    "SweepResult",
    "SweepRow",
    "run_experiment",
    "read_sweep_csv",
    "compare_report",
]
