"""Bounds, failure estimation, experiment reports and the command line."""

from .bounds import converse_holds, converse_max_rate, hash_failure_bound, rand_bound
from .estimate import ErrorEstimate, estimate_error, trial_rng, wilson
from .experiment import ExperimentConfig, Report, build_config, parse_config, run_experiment

__all__ = [
    "ErrorEstimate",
    "ExperimentConfig",
    "Report",
    "build_config",
    "converse_holds",
    "converse_max_rate",
    "estimate_error",
    "hash_failure_bound",
    "parse_config",
    "rand_bound",
    "run_experiment",
    "trial_rng",
    "wilson",
]
