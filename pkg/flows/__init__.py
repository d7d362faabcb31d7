"""Experiment documents and the pipelines that run them."""

from .experiment_config import (
    ExperimentConfig,
    load_experiment_config,
    parse_experiment_config,
    build_system,
    build_assignment,
    build_corruption,
    build_discrete_mrf,
    build_gaussian_mrf,
    summarize,
)
from .experiment_flow import (
    ExperimentReport,
    run_trial,
    run_trials,
    run_experiment,
    run_analytic,
    run_mrf,
    export_dot,
)

__all__ = [
    'ExperimentConfig',
    'load_experiment_config',
    'parse_experiment_config',
    'build_system',
    'build_assignment',
    'build_corruption',
    'build_discrete_mrf',
    'build_gaussian_mrf',
    'summarize',
    'ExperimentReport',
    'run_trial',
    'run_trials',
    'run_experiment',
    'run_analytic',
    'run_mrf',
    'export_dot',
]
