"""Experiment harness: sweeps, estimate ratios, the CG solve, reports and the CLI."""
from .algebra import run_algebra
from .config import ExperimentConfig, config_hash, load_config
from .estimates import run_estimate
from .fitting import FitResult, fit_power_law
from .identities import run_identity_suite
from .report import EstimateReport, Report, ScalingReport, emit_report
from .scaling import run_scaling
from .solve import run_solve

__all__ = [
    "ExperimentConfig",
    "load_config",
    "config_hash",
    "FitResult",
    "fit_power_law",
    "Report",
    "ScalingReport",
    "EstimateReport",
    "emit_report",
    "run_identity_suite",
    "run_scaling",
    "run_estimate",
    "run_solve",
    "run_algebra",
]
