"""scikit-learn wrappers.

Samples are binary matrices, given either as a 3D stack ``(n_samples, n, n)``
or flattened row-major as ``(n_samples, n * n)``.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_matrices
from .complexity.bdm import bdm, resolve_block_size
from .complexity.ctm import CtmTable, default_table
from .complexity.entropy import bit_entropy, block_entropy
from .evolve.config import EvolutionConfig, Strategy
from .experiments.batch import ExperimentSpec, default_threshold, run_batch


def _resolve_table(table) -> CtmTable:
    if table is None:
        return default_table()
    if isinstance(table, CtmTable):
        return table
    return CtmTable.load(table)


class BDMTransformer(BaseEstimator, TransformerMixin):
    """Map each matrix to its BDM value in bits.

    Parameters
    ----------
    table : CtmTable, path or None
        CTM table; ``None`` uses the default table.
    block_size : int or None
        Block side; ``None`` uses the table's natural block side.
    """

    def __init__(self, table=None, block_size=None):
        self.table = table
        self.block_size = block_size

    def fit(self, X, y=None):
        X = check_matrices(X)
        self.table_ = _resolve_table(self.table)
        self.block_size_ = resolve_block_size(self.table_, self.block_size)
        self.n_features_in_ = X.shape[1] * X.shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "table_")
        X = check_matrices(X)
        if X.shape[1] * X.shape[2] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1] * X.shape[2]} features, expected {self.n_features_in_}")
        return np.array([[bdm(m, self.table_, self.block_size_)] for m in X], dtype=float).reshape(-1, 1)


class EntropyTransformer(BaseEstimator, TransformerMixin):
    """Shannon entropy of each matrix: of its bits, or of its blocks when
    ``block_size`` is given."""

    def __init__(self, block_size=None):
        self.block_size = block_size

    def fit(self, X, y=None):
        X = check_matrices(X)
        self.n_features_in_ = X.shape[1] * X.shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_matrices(X)
        if self.block_size is None:
            vals = [bit_entropy(m) for m in X]
        else:
            vals = [block_entropy(m, self.block_size) for m in X]
        return np.asarray(vals, dtype=float).reshape(-1, 1)


class AlgorithmicEvolver(BaseEstimator):
    """Evolve random matrices towards each target matrix.

    ``fit(X)`` treats each sample as a target and runs ``replicates``
    seeded evolutions towards it.  Results are in ``summary_`` (one
    :class:`~algevo.experiments.SummaryStats` per target), ``steps_`` and
    ``converged_`` (shape ``(n_targets, replicates)``).  With
    ``keep_traces=True`` the full traces are in ``traces_``.

    Parameters
    ----------
    strategy : str
        Mutation weighting, e.g. ``"uniform"``, ``"bdm"``, ``"local_bdm"``.
    shifts : int
        Bits flipped per mutation.
    replacement : bool
        Draw mutations with replacement.
    extinction_threshold : int or None
        Draw limit per instance; ``None`` uses 2500 up to 8x8, else 10000.
    alpha : float
        Convergence level of the Hamming distance.
    replicates : int
    random_state : int
        Master seed; replicate ``i`` of target ``j`` is paired across
        estimators sharing it.
    table : CtmTable, path or None
    block_size, bdm_block_size, epsilon
        Strategy parameters.
    n_jobs : int
        Worker threads.
    """

    def __init__(self, strategy="bdm", shifts=1, replacement=False, extinction_threshold=None, alpha=0.0,
                 replicates=10, random_state=0, table=None, block_size=4, bdm_block_size=None,
                 epsilon=1e-10, n_jobs=1, keep_traces=False):
        self.strategy = strategy
        self.shifts = shifts
        self.replacement = replacement
        self.extinction_threshold = extinction_threshold
        self.alpha = alpha
        self.replicates = replicates
        self.random_state = random_state
        self.table = table
        self.block_size = block_size
        self.bdm_block_size = bdm_block_size
        self.epsilon = epsilon
        self.n_jobs = n_jobs
        self.keep_traces = keep_traces

    def _config(self, n) -> EvolutionConfig:
        return EvolutionConfig(
            shifts=self.shifts,
            replacement=self.replacement,
            extinction_threshold=self.extinction_threshold or default_threshold(n),
            alpha=self.alpha,
            strategy=Strategy(self.strategy, self.epsilon, self.block_size, self.bdm_block_size),
        )

    def fit(self, X, y=None):
        X = check_matrices(X)
        n = X.shape[1]
        cfg = self._config(n)
        table = _resolve_table(self.table) if cfg.strategy.needs_table else None
        spec = ExperimentSpec(list(X), self.replicates, [cfg], int(self.random_state))
        res = run_batch(spec, table, threads=self.n_jobs, keep_traces=self.keep_traces)
        self.config_ = replace(cfg, seed=int(self.random_state))
        self.summary_ = [res.stats[j, 0] for j in range(len(X))]
        self.steps_ = np.stack([res.steps[j, 0] for j in range(len(X))])
        self.converged_ = np.stack([res.converged[j, 0] for j in range(len(X))])
        if self.keep_traces:
            self.traces_ = [res.traces[j, 0] for j in range(len(X))]
        self.n_features_in_ = n * n
        return self

    def mean_steps(self) -> np.ndarray:
        check_is_fitted(self, "summary_")
        return np.array([s.mean_steps for s in self.summary_])
