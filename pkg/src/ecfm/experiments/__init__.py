"""End-to-end experiment drivers: configuration, data synthesis, the five
runs, loss-surface scans, and report persistence."""

from .config import ExperimentConfig, config_from_dict, default_config, load_config
from .report import ExperimentReport, run_directory
from .surface import hessian_condition, parse_grid, scan_loss_surface

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "config_from_dict",
    "default_config",
    "hessian_condition",
    "load_config",
    "parse_grid",
    "run_directory",
    "scan_loss_surface",
]
