"""Ant Colony System for the symmetric TSP, tuned per instance by particle swarm optimization."""

from .acs import AcsParams, TrialResult, run_trial
from .bench import PRESETS, ParamPreset, cross_matrix, evaluate_preset
from .pso import PsoConfig, optimize
from .tsplib import TspInstance, load_bundled, parse_instance, read_instance

__all__ = [
    "AcsParams", "TrialResult", "run_trial",
    "PRESETS", "ParamPreset", "cross_matrix", "evaluate_preset",
    "PsoConfig", "optimize",
    "TspInstance", "load_bundled", "parse_instance", "read_instance",
]
__version__ = "0.1.0"
