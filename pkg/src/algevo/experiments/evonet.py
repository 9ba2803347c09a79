"""Evolutionary networks: matrices as nodes, observed improving mutations as
weighted edges."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..complexity.bdm import bdm
from ..complexity.ctm import CtmTable
from ..evolve.neighborhood import hamming
from ..matrix import matrix_hash


@dataclass(frozen=True)
class ForwardMutation:
    """A transition into the target and its share of all such transitions.

    ``changes`` lists ``(row, col, new_bit)`` for every flipped entry.
    """

    from_hash: str
    changes: tuple
    count: int
    probability: float


@dataclass
class EvolutionaryNetwork:
    """Counts of observed improving transitions between matrices.

    ``counts`` keeps every edge; :meth:`edges` applies ``min_count``.
    """

    target: np.ndarray
    nodes: dict = field(default_factory=dict)  # hash -> matrix
    counts: Counter = field(default_factory=Counter)  # (from, to) -> count
    min_count: int = 2

    @property
    def target_hash(self) -> str:
        return matrix_hash(self.target)

    @property
    def total_transitions(self) -> int:
        return sum(self.counts.values())

    def edges(self, min_count: int | None = None) -> list[tuple[str, str, int]]:
        """Edges with ``count >= min_count``, heaviest first, ties by hash."""
        lo = self.min_count if min_count is None else min_count
        out = [(a, b, c) for (a, b), c in self.counts.items() if c >= lo]
        return sorted(out, key=lambda e: (-e[2], e[0], e[1]))

    def node_table(self, table: CtmTable | None = None) -> list[tuple[str, int, float]]:
        """``(hash, fitness, bdm)`` per node, sorted by hash.  BDM is NaN without a table."""
        rows = []
        for h in sorted(self.nodes):
            m = self.nodes[h]
            b = bdm(m, table) if table is not None else math.nan
            rows.append((h, hamming(m, self.target), b))
        return rows

    def forward_mutations(self) -> list[ForwardMutation]:
        """Transitions into the target, as frequency ratios of their counts."""
        t = self.target_hash
        into = [(a, c) for (a, b), c in self.counts.items() if b == t]
        total = sum(c for _, c in into)
        out = []
        for a, c in into:
            diff = np.argwhere(self.nodes[a] != self.target)
            changes = tuple((int(r), int(k), int(self.target[r, k])) for r, k in diff)
            out.append(ForwardMutation(a, changes, c, c / total))
        return sorted(out, key=lambda f: (-f.count, f.from_hash))

    def max_weight(self) -> int:
        return max(self.counts.values(), default=0)


def build_evolutionary_network(traces, min_count: int = 2) -> EvolutionaryNetwork:
    """Aggregate the accepted mutations of ``traces`` (which share a target).

    Every instance that produced a fitter matrix (improved or converged)
    adds one to the edge from the matrix it started at to the matrix it
    produced.
    """
    traces = list(traces)
    if not traces:
        raise ValueError("no traces given")
    target = traces[0].target
    if any(not np.array_equal(tr.target, target) for tr in traces):
        raise ValueError("traces must share a target")
    net = EvolutionaryNetwork(target.copy(), min_count=int(min_count))
    for tr in traces:
        ms = tr.matrices
        hs = [matrix_hash(m) for m in ms]
        for h, m in zip(hs, ms):
            net.nodes.setdefault(h, m)
        for a, b in zip(hs, hs[1:]):
            net.counts[a, b] += 1
    return net
