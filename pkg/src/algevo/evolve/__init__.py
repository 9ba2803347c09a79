"""Mutation neighbourhoods, weighted candidate pools and the evolution engine."""
from .config import STRATEGY_KINDS, EvolutionConfig, Strategy
from .distribution import CandidateDistribution, CandidatePool, build_distribution
from .engine import (
    CONVERGED,
    EXTINCT,
    IMPROVED,
    EvolutionTrace,
    InstanceResult,
    evolve_instance,
    evolve_run,
)
from .neighborhood import apply_flips, flip_sets, hamming, neighborhood, neighborhood_size
from .persistence import PersistentStructureReport, detect_persistent_structures, gamma_estimate

__all__ = [
    "CONVERGED",
    "EXTINCT",
    "IMPROVED",
    "STRATEGY_KINDS",
    "CandidateDistribution",
    "CandidatePool",
    "EvolutionConfig",
    "EvolutionTrace",
    "InstanceResult",
    "PersistentStructureReport",
    "Strategy",
    "apply_flips",
    "build_distribution",
    "detect_persistent_structures",
    "evolve_instance",
    "evolve_run",
    "flip_sets",
    "gamma_estimate",
    "hamming",
    "neighborhood",
    "neighborhood_size",
]
