"""Chasing a dynamic network: evolve towards each stage of a sequence in turn."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..complexity.ctm import CtmTable
from ..evolve.engine import evolve_run
from ..graphs import DynamicSequence, random_matrix
from ..rng import make_rng, mix_seed
from .batch import _map, _table_check

CHASE_MODES = ("evolve", "seed")


@dataclass
class ChaseResult:
    """Cumulative step curves of a chase.

    ``steps[c]`` has shape ``(replicates, n_targets)``: the draws spent
    reaching each target stage in arm ``c`` (NaN once a replicate went
    extinct).  ``stages`` lists the stage index of each target column.
    """

    stages: list
    strategies: list
    steps: list

    def cumulative(self, c: int) -> np.ndarray:
        """Mean cumulative steps per target stage over surviving replicates."""
        cum = np.cumsum(self.steps[c], axis=1)
        alive = np.isfinite(cum)
        n = alive.sum(axis=0)
        total = np.where(alive, cum, 0.0).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, total / np.maximum(n, 1), np.nan)

    def survivors(self, c: int) -> np.ndarray:
        return np.isfinite(np.cumsum(self.steps[c], axis=1)).sum(axis=0)

    def final(self, c: int) -> float:
        return float(self.cumulative(c)[-1])


def chase_dynamic(seq: DynamicSequence, replicates: int, configs, table: CtmTable | None = None, *,
                  master_seed: int = 0, mode: str = "evolve", threads: int = 1,
                  progress=None) -> ChaseResult:
    """Evolve a random matrix through the stages of ``seq``.

    In ``evolve`` mode the random matrix first evolves to stage 0, then
    each reached stage evolves to the next.  In ``seed`` mode the random
    matrix takes the place of stage 0.  Replicate ``i`` starts from the
    same random matrix in every arm; the run towards target stage ``s``
    uses seed ``mix_seed(master_seed, s, i, c)``.  A replicate that goes
    extinct stops contributing from that stage on.
    """
    if mode not in CHASE_MODES:
        raise ValueError(f"unknown chase mode {mode!r}; expected one of {CHASE_MODES}")
    if not isinstance(seq, DynamicSequence):
        raise TypeError("seq must be a DynamicSequence")
    if len(seq) < 2:
        raise ValueError("a chase needs at least two stages")
    if int(replicates) < 1:
        raise ValueError("replicates must be >= 1")
    _table_check(configs, table)
    for cfg in configs:
        cfg.check_size(seq.nodes)
    targets = list(range(len(seq))) if mode == "evolve" else list(range(1, len(seq)))
    jobs = [(c, i) for c in range(len(configs)) for i in range(int(replicates))]

    def work(job):
        c, i = job
        m = random_matrix(make_rng(master_seed, 0, i), seq.nodes)
        row = np.full(len(targets), np.nan)
        for k, s in enumerate(targets):
            cfg = replace(configs[c], seed=mix_seed(master_seed, s, i, c))
            tr = evolve_run(m, seq.stages[s], cfg, table)
            if not tr.converged:
                break
            row[k] = tr.total_steps
            m = tr.matrices[-1]
        return row

    rows = _map(work, jobs, threads, progress)
    steps = [np.array(rows[c * int(replicates):(c + 1) * int(replicates)]) for c in range(len(configs))]
    return ChaseResult(targets, [c.strategy.kind for c in configs], steps)
