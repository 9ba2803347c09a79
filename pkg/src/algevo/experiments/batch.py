"""Paired replicate batches and speed-up curves."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps

from .._validation import check_matrix
from ..complexity.bdm import bdm
from ..complexity.ctm import CtmTable
from ..evolve.engine import EvolutionTrace, evolve_run
from ..graphs import random_matrix
from ..rng import make_rng, mix_seed
from .stats import SummaryStats, speedup_quotient


@dataclass
class ExperimentSpec:
    """Targets, replicate count and strategy arms of a paired batch.

    Replicate ``i`` of target ``j`` starts from the same random matrix in
    every arm.  When ``initials`` is given it replaces the random initial
    matrices (replicate ``i`` uses ``initials[i % len(initials)]``).
    """

    targets: list
    replicates: int
    configs: list
    master_seed: int = 0
    initials: list | None = None
    density: float = 0.5

    def __post_init__(self):
        self.targets = [check_matrix(t, "target") for t in self.targets]
        if not self.targets:
            raise ValueError("at least one target is required")
        if int(self.replicates) < 1:
            raise ValueError("replicates must be >= 1")
        self.replicates = int(self.replicates)
        if not self.configs:
            raise ValueError("at least one config is required")
        n = self.size
        if any(t.shape != (n, n) for t in self.targets):
            raise ValueError("all targets must have the same size")
        for c in self.configs:
            c.check_size(n)
        if self.initials is not None:
            self.initials = [check_matrix(m, "initial") for m in self.initials]
            if not self.initials or any(m.shape != (n, n) for m in self.initials):
                raise ValueError("initial matrices must match the target size")

    @property
    def size(self) -> int:
        return self.targets[0].shape[0]

    def initial(self, j: int, i: int) -> np.ndarray:
        if self.initials is not None:
            return self.initials[i % len(self.initials)]
        return random_matrix(make_rng(self.master_seed, j, i), self.size, self.density)

    def run_seed(self, j: int, i: int, c: int) -> int:
        return mix_seed(self.master_seed, j, i, c)


@dataclass
class BatchResult:
    spec: ExperimentSpec
    stats: dict  # (target index, config index) -> SummaryStats
    steps: dict  # (target index, config index) -> int array per replicate
    converged: dict
    traces: dict = field(default_factory=dict)

    def cell(self, j: int, c: int) -> SummaryStats:
        return self.stats[j, c]


def _table_check(configs, table):
    if table is None and any(c.strategy.needs_table for c in configs):
        raise ValueError("a CTM table is required by a BDM strategy")


def run_batch(spec: ExperimentSpec, table: CtmTable | None = None, *, threads: int = 1,
              keep_traces: bool = False, progress=None) -> BatchResult:
    """Run every (target, replicate, config) triple of ``spec``.

    Replicate ``i`` of target ``j`` in arm ``c`` runs with seed
    ``mix_seed(master_seed, j, i, c)``.  Jobs may run on ``threads``
    workers; results are merged by index, so they do not depend on the
    schedule.  ``progress`` is called once per finished job, in job order.
    """
    _table_check(spec.configs, table)
    jobs = [(j, i, c) for j in range(len(spec.targets))
            for c in range(len(spec.configs)) for i in range(spec.replicates)]

    def work(job):
        j, i, c = job
        cfg = replace(spec.configs[c], seed=spec.run_seed(j, i, c))
        return evolve_run(spec.initial(j, i), spec.targets[j], cfg, table)

    results = _map(work, jobs, threads, progress)
    steps, conv, traces = {}, {}, {}
    for (j, i, c), tr in zip(jobs, results):
        steps.setdefault((j, c), np.zeros(spec.replicates, dtype=np.int64))[i] = tr.total_steps
        conv.setdefault((j, c), np.zeros(spec.replicates, dtype=bool))[i] = tr.converged
        if keep_traces:
            traces.setdefault((j, c), [None] * spec.replicates)[i] = tr
    st = {k: SummaryStats.from_runs(steps[k], conv[k]) for k in steps}
    return BatchResult(spec, st, steps, conv, traces)


def _map(fn, jobs, threads, progress=None):
    if threads is None or threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1:
        out = []
        for job in jobs:
            out.append(fn(job))
            if progress is not None:
                progress(job)
        return out
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futures = [ex.submit(fn, job) for job in jobs]
        out = []
        for job, f in zip(jobs, futures):
            out.append(f.result())
            if progress is not None:
                progress(job)
        return out


@dataclass(frozen=True)
class SpeedUpRow:
    target_index: int
    target_bdm: float
    strategy: str
    s_u: float
    s_f: float
    delta: float
    extinction_diff: int


@dataclass
class SpeedUpCurve:
    """Per-target speed-up of each non-baseline arm over the baseline arm.

    ``fits`` maps a strategy to least-squares polynomial coefficients of
    delta against target BDM (highest degree first); ``spearman`` maps it
    to ``(rho, p_value)``.
    """

    rows: list
    fits: dict
    spearman: dict
    batch: BatchResult | None = None


def speedup_curve(sequence, replicates: int, configs, table: CtmTable, *, master_seed: int = 0,
                  threads: int = 1, fit_degree: int | None = 3, progress=None) -> SpeedUpCurve:
    """Speed-up quotient for every target of ``sequence``.

    ``configs[0]`` is the baseline arm (normally uniform).  Rows with an
    undefined quotient carry NaN and are left out of the fit and the rank
    correlation.
    """
    if len(sequence) == 0:
        raise ValueError("sequence is empty")
    if len(configs) < 2:
        raise ValueError("need a baseline config and at least one compared config")
    spec = ExperimentSpec(list(sequence), replicates, list(configs), master_seed)
    res = run_batch(spec, table, threads=threads, progress=progress)
    rows = []
    for j, t in enumerate(spec.targets):
        tb = bdm(t, table)
        base = res.stats[j, 0]
        for c in range(1, len(configs)):
            f = res.stats[j, c]
            try:
                d = speedup_quotient(base, f)
            except ValueError:
                d = math.nan
            rows.append(SpeedUpRow(j, tb, configs[c].strategy.kind, base.mean_steps, f.mean_steps, d,
                                   base.n_extinct - f.n_extinct))
    fits, rho = {}, {}
    for kind in dict.fromkeys(r.strategy for r in rows):
        pts = np.array([(r.target_bdm, r.delta) for r in rows if r.strategy == kind and math.isfinite(r.delta)])
        if len(pts) >= 3:
            rho[kind] = tuple(float(x) for x in sps.spearmanr(pts[:, 0], pts[:, 1]))
        if fit_degree is not None and len(pts) > fit_degree:
            fits[kind] = np.polyfit(pts[:, 0], pts[:, 1], fit_degree).tolist()
    return SpeedUpCurve(rows, fits, rho, res)


def trace_list(res: BatchResult, j: int, c: int) -> list[EvolutionTrace]:
    if (j, c) not in res.traces:
        raise KeyError("batch was run without keep_traces=True")
    return res.traces[j, c]


def default_threshold(size: int) -> int:
    """Extinction threshold used for a matrix side: 2500 up to 8, else 10000."""
    return 2500 if size <= 8 else 10000



TARGET_STREAM = 2**31


def random_targets(master_seed: int, count: int, size: int, density: float = 0.5) -> list[np.ndarray]:
    """``count`` random targets on their own stream, apart from the initial matrices."""
    return [random_matrix(make_rng(master_seed, TARGET_STREAM, j), size, density) for j in range(count)]
