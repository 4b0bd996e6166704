"""
Experiments module - config files, method registry, runner and report
"""
from splinenet.experiments.config_file import load_experiment_config, parse_experiment_config
from splinenet.experiments.datasets import generate_dataset
from splinenet.experiments.methods import METHODS, MethodResult
from splinenet.experiments.runner import MethodExecutor, run_experiment, run_experiment_async

__all__ = [
    "load_experiment_config",
    "parse_experiment_config",
    "generate_dataset",
    "METHODS",
    "MethodResult",
    "MethodExecutor",
    "run_experiment",
    "run_experiment_async",
]
