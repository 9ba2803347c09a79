"""Evolution instances and runs.

An *instance* draws mutations of the current matrix until one lowers the
Hamming distance to the target (improved), reaches the convergence level
``alpha`` (converged) or the extinction threshold is hit (extinct).  A
*run* chains instances from the initial matrix until convergence or
extinction.  Draw memory never outlives an instance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_matrix, check_same_shape
from ..complexity.ctm import CtmTable
from ..matrix import from_bitstring, to_bitstring
from ..rng import make_rng
from .config import EvolutionConfig
from .distribution import CandidatePool, build_distribution
from .neighborhood import apply_flips, candidate_fitness, hamming

IMPROVED = "improved"
CONVERGED = "converged"
EXTINCT = "extinct"


@dataclass
class InstanceResult:
    outcome: str
    steps: int
    matrix: np.ndarray | None = None
    fitness: int | None = None
    drawn: list | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "steps": self.steps,
            "fitness_after": self.fitness,
            "matrix": None if self.matrix is None else to_bitstring(self.matrix),
        }


@dataclass
class EvolutionTrace:
    initial: np.ndarray
    target: np.ndarray
    config: EvolutionConfig
    instances: list[InstanceResult]

    @property
    def total_steps(self) -> int:
        return sum(r.steps for r in self.instances)

    @property
    def terminal(self) -> str:
        if not self.instances:
            return CONVERGED
        return EXTINCT if self.instances[-1].outcome == EXTINCT else CONVERGED

    @property
    def converged(self) -> bool:
        return self.terminal == CONVERGED

    @property
    def matrices(self) -> list[np.ndarray]:
        """Initial matrix followed by every accepted mutation."""
        return [self.initial] + [r.matrix for r in self.instances if r.matrix is not None]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "initial": to_bitstring(self.initial),
            "target": to_bitstring(self.target),
            "instances": [r.to_dict() for r in self.instances],
            "terminal": self.terminal,
            "total_steps": self.total_steps,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "EvolutionTrace":
        instances = [
            InstanceResult(
                r["outcome"],
                int(r["steps"]),
                None if r["matrix"] is None else from_bitstring(r["matrix"]),
                r["fitness_after"],
            )
            for r in d["instances"]
        ]
        return cls(
            from_bitstring(d["initial"]),
            from_bitstring(d["target"]),
            EvolutionConfig.from_dict(d["config"]),
            instances,
        )

    @classmethod
    def from_json(cls, text: str) -> "EvolutionTrace":
        return cls.from_dict(json.loads(text))


def evolve_instance(m, target, cfg: EvolutionConfig, table: CtmTable | None = None,
                    rng: np.random.Generator | None = None, *, record: bool = False) -> InstanceResult:
    """Run one draw-until-improvement instance from ``m``.

    Steps count draws, starting at 1; the improving draw is included.
    Without replacement an instance also ends as extinct when the pool
    is exhausted, with ``steps`` equal to the pool size.  With
    ``record=True`` the drawn candidates are kept in ``result.drawn``.
    """
    m, target = check_matrix(m), check_matrix(target, "target")
    check_same_shape(m, target)
    current = hamming(m, target)
    if current <= cfg.alpha:
        raise ValueError(f"matrix already within alpha={cfg.alpha} of the target")
    rng = make_rng(cfg.seed) if rng is None else rng
    dist = build_distribution(m, cfg, table)
    fit = candidate_fitness(m, target, dist.flips)
    pool = CandidatePool(dist, rng, cfg.replacement)
    history = [] if record else None
    idx, steps = pool.draw_until(fit < current, cfg.extinction_threshold, history)
    drawn = [dist.candidate(i) for i in history] if record else None
    if idx is None:
        return InstanceResult(EXTINCT, steps, drawn=drawn)
    f = int(fit[idx])
    outcome = CONVERGED if f <= cfg.alpha else IMPROVED
    return InstanceResult(outcome, steps, apply_flips(m, dist.flips[idx]), f, drawn)


def evolve_run(m0, target, cfg: EvolutionConfig, table: CtmTable | None = None,
               rng: np.random.Generator | None = None, *, record: bool = False) -> EvolutionTrace:
    """Chain instances from ``m0`` until convergence or extinction.

    The random stream defaults to ``make_rng(cfg.seed)``, so a run is
    fully determined by ``(m0, target, cfg, table)``.
    """
    m0, target = check_matrix(m0, "m0"), check_matrix(target, "target")
    check_same_shape(m0, target)
    cfg.check_size(m0.shape[0])
    rng = make_rng(cfg.seed) if rng is None else rng
    instances = []
    m = m0
    while hamming(m, target) > cfg.alpha:
        res = evolve_instance(m, target, cfg, table, rng, record=record)
        instances.append(res)
        if res.outcome != IMPROVED:
            break
        m = res.matrix
    return EvolutionTrace(m0, target, cfg, instances)
