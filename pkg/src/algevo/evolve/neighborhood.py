"""Mutation neighbourhoods: every matrix at Hamming distance exactly ``k``."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .._validation import check_matrix, check_same_shape
from ..exceptions import ResourceLimitError

MAX_CANDIDATES = 5_000_000


def hamming(a, b) -> int:
    """Number of positions where two equally sized binary matrices differ."""
    a, b = check_matrix(a, "a"), check_matrix(b, "b")
    check_same_shape(a, b)
    return int(np.count_nonzero(a != b))


def neighborhood_size(n: int, k: int) -> int:
    return math.comb(n * n, k)


@lru_cache(maxsize=16)
def _flip_sets(n: int, k: int) -> np.ndarray:
    size = neighborhood_size(n, k)
    if size > MAX_CANDIDATES:
        raise ResourceLimitError(f"{size} candidates for n={n}, k={k} exceed {MAX_CANDIDATES}")
    dtype = np.int16 if n * n < 2**15 else np.int32
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n * n), k)),
        dtype=dtype,
        count=size * k,
    )
    out = flat.reshape(size, k)
    out.setflags(write=False)
    return out


def flip_sets(n: int, k: int) -> np.ndarray:
    """Flat flip positions of every candidate, shape ``(C(n*n, k), k)``.

    Rows follow the lexicographic order of position combinations, which
    is the canonical candidate order used everywhere in this package.
    """
    if not 1 <= k <= n * n:
        raise ValueError(f"k must be in 1..{n * n}, got {k}")
    return _flip_sets(n, k)


def apply_flips(m, flat_positions) -> np.ndarray:
    out = check_matrix(m).copy()
    flat = out.reshape(-1)
    flat[np.asarray(flat_positions, dtype=np.int64)] ^= 1
    return out


def neighborhood(m, k: int):
    """Lazily yield every matrix at Hamming distance exactly ``k`` from ``m``."""
    m = check_matrix(m)
    n = m.shape[0]
    if not 1 <= k <= n * n:
        raise ValueError(f"k must be in 1..{n * n}, got {k}")
    for combo in itertools.combinations(range(n * n), k):
        yield apply_flips(m, combo)


def candidate_fitness(m, target, flips: np.ndarray) -> np.ndarray:
    """Hamming distance to ``target`` of every candidate in ``flips``."""
    m, target = check_matrix(m), check_matrix(target, "target")
    check_same_shape(m, target)
    agree = (m == target).reshape(-1)
    step = np.where(agree, 1, -1).astype(np.int64)
    return int((~agree).sum()) + step[flips].sum(axis=1)
