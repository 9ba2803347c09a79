"""Target matrices: static graphs, edge-removal sequences, recursively
grown dynamic networks and edge-list files.

Vertices are labelled ``1..n`` in the generators and stored at index
``label - 1``.  Undirected edges set both ``(i, j)`` and ``(j, i)``.
"""
from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import DataFormatError

STATIC_KINDS = ("complete", "star", "grid", "empty")
DYNAMIC_KINDS = ("zk", "kary_tree", "growing_star", "star_to_path")


@dataclass(frozen=True)
class GraphSpec:
    """Static undirected target graph.

    ``rows`` and ``cols`` only apply to grids; they default to ``2`` by
    ``nodes // 2``.
    """

    kind: str
    nodes: int
    directed: bool = False
    rows: int | None = None
    cols: int | None = None

    def __post_init__(self):
        if self.kind not in STATIC_KINDS:
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.nodes < 2:
            raise ValueError("nodes must be >= 2")
        if self.directed:
            raise ValueError("static targets are undirected")
        if self.kind == "grid":
            rows = self.rows or 2
            cols = self.cols or self.nodes // rows
            if rows * cols != self.nodes:
                raise ValueError(f"grid {rows}x{cols} does not have {self.nodes} nodes")
            object.__setattr__(self, "rows", rows)
            object.__setattr__(self, "cols", cols)
        elif self.rows is not None or self.cols is not None:
            raise ValueError("rows/cols only apply to grid graphs")


def _undirected(n, edges) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        m[i, j] = m[j, i] = 1
    return m


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Lattice edges with vertex ``(r, c)`` at index ``r + rows * c``.

    The first coordinate varies fastest, as in Wolfram's ``GridGraph``.
    """
    idx = lambda r, c: r + rows * c  # noqa: E731
    edges = []
    for c in range(cols):
        for r in range(rows):
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
    return edges


def make_static_target(spec: GraphSpec) -> np.ndarray:
    n = spec.nodes
    if spec.kind == "complete":
        return (1 - np.eye(n, dtype=np.uint8)).astype(np.uint8)
    if spec.kind == "star":
        return _undirected(n, [(0, j) for j in range(1, n)])
    if spec.kind == "grid":
        return _undirected(n, grid_edges(spec.rows, spec.cols))
    return np.zeros((n, n), dtype=np.uint8)


def edge_removal_sequence(nodes: int) -> list[np.ndarray]:
    """Complete graph minus one more edge at each step, down to the empty graph.

    Edges go in lexicographic ``(i, j)``, ``i < j`` order.  The complete
    graph itself is not included, so there are ``nodes * (nodes - 1) / 2``
    matrices.
    """
    m = make_static_target(GraphSpec("complete", nodes))
    out = []
    for i in range(nodes):
        for j in range(i + 1, nodes):
            m = m.copy()
            m[i, j] = m[j, i] = 0
            out.append(m)
    return out


# dynamic networks -----------------------------------------------------------


@dataclass(frozen=True)
class DynamicSequence:
    kind: str
    nodes: int
    stages: tuple

    def __post_init__(self):
        if len(self.stages) < 1:
            raise ValueError("a dynamic sequence needs at least one stage")
        seen = set()
        for s in self.stages:
            if s.shape != (self.nodes, self.nodes):
                raise ValueError(f"stage of shape {s.shape} does not fit {self.nodes} nodes")
            key = s.tobytes()
            if key in seen:
                raise ValueError("dynamic sequence stages must be pairwise distinct")
            seen.add(key)

    def __len__(self):
        return len(self.stages)


class _EdgeMultiset:
    """Edge store with multigraph semantics: adding an existing edge keeps a
    second copy and deleting removes a single copy."""

    def __init__(self, directed: bool):
        self.directed = directed
        self.edges = Counter()

    def _key(self, u, v):
        return (u, v) if self.directed else (min(u, v), max(u, v))

    def add(self, u, v):
        self.edges[self._key(u, v)] += 1

    def delete(self, u, v):
        k = self._key(u, v)
        if self.edges[k]:
            self.edges[k] -= 1
            if not self.edges[k]:
                del self.edges[k]

    def degree(self, v) -> int:
        return sum(c * ((a == v) + (b == v)) for (a, b), c in self.edges.items())

    def vertices(self) -> set:
        return {x for e in self.edges for x in e}

    def max_degree(self) -> int:
        return max(self.degree(v) for v in self.vertices())

    def matrix(self, n) -> np.ndarray:
        m = np.zeros((n, n), dtype=np.uint8)
        for a, b in self.edges:
            m[a - 1, b - 1] = 1
            if not self.directed:
                m[b - 1, a - 1] = 1
        return m

    def fits(self, n) -> bool:
        return all(1 <= v <= n for v in self.vertices())


def _zk_stages(n):
    g = _EdgeMultiset(directed=True)
    g.add(1, 2)
    stages = []
    while g.fits(n):
        stages.append(g.matrix(n))
        d = g.max_degree()
        src = d + 1
        for t in range(d + 2, 2 * (d + 1) - g.degree(src) + 1):
            g.add(src, t)
    return stages


def _kary_edges(size, k=2):
    # vertex i (1-based) has children k*(i-1)+2 .. k*(i-1)+k+1
    return [(i, c) for i in range(1, size + 1)
            for c in range(k * (i - 1) + 2, k * (i - 1) + k + 2) if c <= size]


def _kary_stages(n, k=2):
    out = []
    for size in range(2, n + 1):
        g = _EdgeMultiset(directed=False)
        for u, v in _kary_edges(size, k):
            g.add(u, v)
        out.append(g.matrix(n))
    return out


def _growing_star_stages(n):
    # star on n' vertices has centre 1 and leaves 2..n'; copy n' is shifted by
    # 2n', so consecutive stars share one vertex.  Labels are shifted down so
    # the first centre is vertex 1.
    out = []
    i = 3
    while True:
        edges = [(1 + 2 * s, leaf + 2 * s) for s in range(3, i + 1) for leaf in range(2, s + 1)]
        low = min(min(e) for e in edges) - 1
        g = _EdgeMultiset(directed=True)
        for u, v in edges:
            g.add(u - low, v - low)
        if not g.fits(n):
            return out
        out.append(g.matrix(n))
        i += 1


def _star_to_path_stages(n):
    g = _EdgeMultiset(directed=False)
    star = [(1, j) for j in range(2, n + 1)]
    for u, v in star:
        g.add(u, v)
    cycle = [(j, j + 1) for j in range(1, n)] + [(1, n)]
    adds = (cycle + [(1, n)])[:-1]
    deletes = star + [(1, n)]
    out = [g.matrix(n)]
    for (a, b), (c, d) in zip(adds, deletes):
        g.add(a, b)
        g.delete(c, d)
        out.append(g.matrix(n))
    return out


def dynamic_sequence(kind: str, nodes: int = 16) -> DynamicSequence:
    """Stages of a recursively grown network, truncated to ``nodes`` vertices.

    Consecutive identical stages (a step that adds and removes the same
    edge) are collapsed.
    """
    makers = {
        "zk": _zk_stages,
        "kary_tree": _kary_stages,
        "growing_star": _growing_star_stages,
        "star_to_path": _star_to_path_stages,
    }
    if kind not in makers:
        raise ValueError(f"unknown dynamic kind {kind!r}; expected one of {DYNAMIC_KINDS}")
    stages = []
    for s in makers[kind](nodes):
        if not stages or not np.array_equal(stages[-1], s):
            stages.append(s)
    return DynamicSequence(kind, nodes, tuple(stages))


# edge lists ---------------------------------------------------------------------


def parse_edge_list(text: str, size: int | None = None) -> tuple[np.ndarray, list[str]]:
    """Directed adjacency matrix and node names from edge-list text.

    Format: a ``nodes: a,b,c`` header, then ``source<TAB>target`` lines.
    Blank lines and lines starting with ``#`` are ignored.  Node indices
    follow the header order.  Duplicate edges only warn.
    """
    lines = [(i, ln.rstrip("\r")) for i, ln in enumerate(text.split("\n"), start=1)]
    lines = [(i, ln) for i, ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataFormatError("edge list is empty")
    lineno, head = lines[0]
    key, sep, rest = head.partition(":")
    if not sep or key.strip() != "nodes":
        raise DataFormatError(f"line {lineno}: expected 'nodes: name1,name2,...' header")
    names = [x.strip() for x in rest.split(",") if x.strip()]
    if not names:
        raise DataFormatError(f"line {lineno}: no node names declared")
    if len(set(names)) != len(names):
        raise DataFormatError(f"line {lineno}: duplicate node names")
    size = len(names) if size is None else int(size)
    if len(names) > size:
        raise DataFormatError(f"{len(names)} declared nodes do not fit a {size}x{size} matrix")
    index = {name: i for i, name in enumerate(names)}
    m = np.zeros((size, size), dtype=np.uint8)
    for lineno, ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 2:
            raise DataFormatError(f"line {lineno}: expected 'source<TAB>target'")
        src, tgt = parts[0].strip(), parts[1].strip()
        for name in (src, tgt):
            if name not in index:
                raise DataFormatError(f"line {lineno}: undeclared node {name!r}")
        if src == tgt:
            raise DataFormatError(f"line {lineno}: self-loop {src}->{tgt}")
        if m[index[src], index[tgt]]:
            warnings.warn(f"line {lineno}: duplicate edge {src}->{tgt}", stacklevel=2)
        m[index[src], index[tgt]] = 1
    return m, names


def load_edge_list(path, size: int | None = None) -> np.ndarray:
    m, _ = parse_edge_list(Path(path).read_text(encoding="utf-8"), size)
    return m


def dump_edge_list(m, names) -> str:
    m = np.asarray(m)
    out = ["nodes: " + ",".join(names)]
    for i, j in zip(*np.nonzero(m)):
        out.append(f"{names[i]}\t{names[j]}")
    return "\n".join(out) + "\n"


def erbb_network() -> tuple[np.ndarray, list[str]]:
    """The bundled 16-node ERBB signalling topology and its node names."""
    text = resources.files("algevo").joinpath("data/erbb16.tsv").read_text(encoding="utf-8")
    return parse_edge_list(text)


def random_matrix(rng: np.random.Generator, size: int, density: float = 0.5) -> np.ndarray:
    """Independent Bernoulli(``density``) bits."""
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    return (rng.random((size, size)) < density).astype(np.uint8)


_NAMED = re.compile(r"^(complete|star|empty)(\d+)$|^grid(\d+)x(\d+)$|^erbb16$")


def named_target(name: str) -> np.ndarray:
    """Resolve built-in target names such as ``complete8``, ``grid2x4``,
    ``star16`` or ``erbb16``."""
    mt = _NAMED.match(name)
    if not mt:
        raise ValueError(f"unknown target name {name!r}")
    if name == "erbb16":
        return erbb_network()[0]
    if mt.group(1):
        return make_static_target(GraphSpec(mt.group(1), int(mt.group(2))))
    rows, cols = int(mt.group(3)), int(mt.group(4))
    return make_static_target(GraphSpec("grid", rows * cols, rows=rows, cols=cols))
