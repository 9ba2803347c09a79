"""Paired experiment batches, speed-up statistics, dynamic chases and
evolutionary networks."""
from .batch import (
    BatchResult,
    ExperimentSpec,
    SpeedUpCurve,
    SpeedUpRow,
    default_threshold,
    random_targets,
    run_batch,
    speedup_curve,
)
from .chase import CHASE_MODES, ChaseResult, chase_dynamic
from .evonet import EvolutionaryNetwork, ForwardMutation, build_evolutionary_network
from .stats import SummaryStats, intervals_disjoint, speedup_quotient

__all__ = [
    "CHASE_MODES",
    "BatchResult",
    "ChaseResult",
    "EvolutionaryNetwork",
    "ExperimentSpec",
    "ForwardMutation",
    "SpeedUpCurve",
    "SpeedUpRow",
    "SummaryStats",
    "build_evolutionary_network",
    "chase_dynamic",
    "default_threshold",
    "intervals_disjoint",
    "random_targets",
    "run_batch",
    "speedup_curve",
    "speedup_quotient",
]
