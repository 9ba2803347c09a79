"""Candidate weighting and sequential draws from the weighted pool."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_matrix
from ..complexity.bdm import (
    bdm_from_codes,
    block_entropy_from_codes,
    candidate_codes,
    resolve_block_size,
)
from ..complexity.ctm import CtmTable
from ..complexity.entropy import binary_entropy
from ..exceptions import PoolExhaustedError
from .config import EvolutionConfig
from .neighborhood import apply_flips, flip_sets


@dataclass
class CandidateDistribution:
    """Probability assignment over the mutation neighbourhood of a matrix.

    Attributes
    ----------
    matrix : ndarray
        The matrix being mutated.
    flips : ndarray, shape (C, k)
        Flat flip positions of each candidate.
    log_weights : ndarray, shape (C,)
        Unnormalised ``log2`` weights; ``-inf`` marks candidates outside
        the pool (local BDM candidates that straddle submatrices).
    scores : ndarray or None
        The complexity value (BDM or entropy) behind each weight.
    groups : ndarray or None
        Submatrix index of each candidate for ``local_bdm``; the draw first
        picks a submatrix uniformly, then a candidate inside it.
    """

    matrix: np.ndarray
    flips: np.ndarray
    log_weights: np.ndarray
    scores: np.ndarray | None = None
    groups: np.ndarray | None = None

    def __len__(self):
        return len(self.flips)

    @property
    def in_pool(self) -> np.ndarray:
        return np.isfinite(self.log_weights)

    @property
    def probabilities(self) -> np.ndarray:
        """Single-draw probability of every candidate, summing to one."""
        lw = self.log_weights
        w = np.exp2(lw - lw[self.in_pool].max())
        w[~self.in_pool] = 0.0
        if self.groups is None:
            return w / w.sum()
        p = np.zeros_like(w)
        live = np.unique(self.groups[self.in_pool])
        for g in live:
            sel = self.groups == g
            p[sel] = w[sel] / w[sel].sum() / len(live)
        return p

    def candidate(self, i: int) -> np.ndarray:
        return apply_flips(self.matrix, self.flips[i])


def _submatrix_of(flips, n, b):
    rows, cols = np.divmod(flips.astype(np.int64), n)
    g = (rows // b) * (n // b) + cols // b
    same = (g == g[:, :1]).all(axis=1)
    return np.where(same, g[:, 0], -1)


def build_distribution(m, cfg: EvolutionConfig, table: CtmTable | None = None) -> CandidateDistribution:
    """Weight every candidate at Hamming distance ``cfg.shifts`` from ``m``.

    Weights: uniform 1; BDM ``2**-BDM``; entropy ``1/(h + eps)`` (linear)
    or ``2**-h`` (exp), with ``h`` the bit or block entropy.  ``local_bdm``
    uses BDM weights inside each non-overlapping submatrix.
    """
    m = check_matrix(m)
    n = m.shape[0]
    cfg.check_size(n)
    s = cfg.strategy
    flips = flip_sets(n, cfg.shifts)
    scores = groups = None

    if s.kind == "uniform":
        logw = np.zeros(len(flips))
    elif s.kind in ("bdm", "local_bdm"):
        if table is None:
            raise ValueError(f"strategy {s.kind!r} needs a CTM table")
        b = resolve_block_size(table, s.bdm_block_size)
        scores = bdm_from_codes(candidate_codes(m, flips, b), table._dense(b * b))
        logw = -scores
        if s.kind == "local_bdm":
            groups = _submatrix_of(flips, n, s.block_size)
            logw = np.where(groups >= 0, logw, -np.inf)
    else:
        if s.kind.startswith("block_"):
            scores = block_entropy_from_codes(candidate_codes(m, flips, s.block_size))
        else:
            ones = int(m.sum()) + (1 - 2 * m.reshape(-1).astype(np.int64))[flips].sum(axis=1)
            scores = binary_entropy(ones / (n * n))
        if s.kind.endswith("linear"):
            logw = -np.log2(scores + s.epsilon)
        else:
            logw = -scores
    dist = CandidateDistribution(m, flips, np.asarray(logw, dtype=float), scores, groups)
    if not dist.in_pool.any():
        raise PoolExhaustedError("no candidate is eligible under this strategy")
    return dist


class CandidatePool:
    """Sequential draws from a :class:`CandidateDistribution`.

    Without replacement the draw order is fixed up front by an exponential
    race (candidate ``i`` gets key ``E_i / w_i`` with ``E_i ~ Exp(1)``;
    draws come in increasing key order).  This is distributed exactly as
    drawing one candidate at a time and renormalising the remaining
    weights, and each draw then costs O(1) after an O(C log C) setup.
    With replacement every draw inverts the cumulative weights.

    ``local_bdm`` distributions pick a submatrix uniformly at every draw,
    among those that still hold undrawn candidates, then a candidate in it.

    All randomness comes from ``rng``; the same generator state gives the
    same draw sequence whether candidates are pulled with :meth:`draw` or
    :meth:`draw_until`.
    """

    _BUFFER = 256

    def __init__(self, dist: CandidateDistribution, rng: np.random.Generator, replacement: bool = False):
        self.dist = dist
        self.rng = rng
        self.replacement = bool(replacement)
        self.drawn = 0
        self._buf = np.empty(0)
        self._bpos = 0
        lw = dist.log_weights
        live = np.flatnonzero(dist.in_pool)
        w = np.exp2(lw[live] - lw[live].max())
        if dist.groups is None:
            self._groups = [live]
            weights = [w]
        else:
            g = dist.groups[live]
            self._groups = [live[g == k] for k in np.unique(g)]
            weights = [w[g == k] for k in np.unique(g)]
        if self.replacement:
            self._cdf = [np.cumsum(x) for x in weights]
        else:
            self._order = []
            for idx, x in zip(self._groups, weights):
                keys = np.log(self.rng.exponential(size=len(idx))) - np.log(x)
                self._order.append(idx[np.argsort(keys, kind="stable")])
            self._next = [0] * len(self._order)
            self._active = list(range(len(self._order)))
        self.size = len(live)

    def __len__(self):
        """Candidates still available for drawing."""
        return self.size if self.replacement else self.size - self.drawn

    def _uniform(self) -> float:
        if self._bpos >= len(self._buf):
            self._buf = self.rng.random(self._BUFFER)
            self._bpos = 0
        u = self._buf[self._bpos]
        self._bpos += 1
        return float(u)

    def _pick_group(self) -> int:
        if len(self._groups) == 1:
            return 0
        if self.replacement:
            return int(self._uniform() * len(self._groups))
        return self._active[int(self._uniform() * len(self._active))]

    def draw(self) -> int:
        """Index (into the distribution) of the next drawn candidate."""
        if not self.replacement and self.drawn >= self.size:
            raise PoolExhaustedError("every candidate has been drawn")
        g = self._pick_group()
        if self.replacement:
            cdf = self._cdf[g]
            j = int(np.searchsorted(cdf, self._uniform() * cdf[-1], side="right"))
            idx = int(self._groups[g][min(j, len(cdf) - 1)])
        else:
            idx = int(self._order[g][self._next[g]])
            self._next[g] += 1
            if self._next[g] == len(self._order[g]):
                self._active.remove(g)
        self.drawn += 1
        return idx

    def remaining_probabilities(self) -> np.ndarray:
        """Probability of each candidate being the next draw."""
        p = np.zeros(len(self.dist))
        lw = self.dist.log_weights
        groups = range(len(self._groups)) if self.replacement else self._active
        for g in groups:
            idx = self._groups[g] if self.replacement else self._order[g][self._next[g]:]
            w = np.exp2(lw[idx] - lw[idx].max())
            p[idx] = w / w.sum() / len(groups)
        return p

    def draw_until(self, accept: np.ndarray, limit: int, history: list | None = None):
        """Draw until a candidate with ``accept[i]`` appears.

        Stops after ``limit`` draws or when the pool runs dry.  Returns
        ``(index or None, draws)``.  Drawn indices are appended to
        ``history`` when given.
        """
        steps = 0
        if not self.replacement and len(self._groups) == 1:
            order = self._order[0]
            start = self._next[0]
            window = order[start:start + limit]
            hits = np.flatnonzero(accept[window])
            steps = int(hits[0]) + 1 if len(hits) else len(window)
            if history is not None:
                history.extend(window[:steps].tolist())
            self._next[0] += steps
            self.drawn += steps
            if self._next[0] == len(order):
                self._active = []
            return (int(window[hits[0]]) if len(hits) else None), steps
        if self.replacement and len(self._groups) == 1:
            cdf, members = self._cdf[0], self._groups[0]
            while steps < limit:
                if self._bpos >= len(self._buf):
                    self._buf = self.rng.random(self._BUFFER)
                    self._bpos = 0
                take = min(limit - steps, len(self._buf) - self._bpos)
                u = self._buf[self._bpos:self._bpos + take]
                j = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(cdf) - 1)
                idx = members[j]
                hits = np.flatnonzero(accept[idx])
                used = int(hits[0]) + 1 if len(hits) else take
                if history is not None:
                    history.extend(idx[:used].tolist())
                self._bpos += used
                self.drawn += used
                steps += used
                if len(hits):
                    return int(idx[hits[0]]), steps
            return None, steps
        while steps < limit and len(self) > 0:
            idx = self.draw()
            steps += 1
            if history is not None:
                history.append(idx)
            if accept[idx]:
                return idx, steps
        return None, steps
