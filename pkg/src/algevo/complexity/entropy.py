"""Shannon entropy of binary matrices, over single bits or over blocks."""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .._validation import check_matrix
from .bdm import block_codes


def binary_entropy(p):
    """Entropy in bits of a Bernoulli(p) variable; vectorised, 0 at p in {0, 1}."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    return np.where((p <= 0) | (p >= 1), 0.0, h)


def bit_entropy(m) -> float:
    m = check_matrix(m)
    return float(binary_entropy(m.mean()))


def block_entropy(m, block_size: int = 4) -> float:
    """Entropy of the empirical distribution of non-overlapping block values."""
    counts = Counter(block_codes(m, block_size).tolist())
    total = sum(counts.values())
    return -sum((c / total) * math.log2(c / total) for c in sorted(counts.values()))
