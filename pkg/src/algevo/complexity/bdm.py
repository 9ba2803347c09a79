"""Block Decomposition Method for square binary matrices.

The matrix is cut into non-overlapping ``b x b`` blocks.  Each distinct
block value ``s`` occurring ``n_s`` times contributes
``CTM(s) + log2(n_s)``.  Blocks are flattened row-major into ``b*b``-bit
strings before the table lookup; the integer *code* of a block is that
string read as a binary number.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .._validation import check_block_size, check_matrix
from ..exceptions import UnsupportedBlockError
from .ctm import CtmTable


def resolve_block_size(table: CtmTable, block_size: int | None) -> int:
    """``block_size`` or, when ``None``, the table's natural block side."""
    b = table.block_side if block_size is None else int(block_size)
    if b * b > table.max_length:
        raise UnsupportedBlockError(
            f"{b}x{b} blocks need {b * b}-bit CTM entries; table stops at {table.max_length} bits"
        )
    return b


def _weights(b: int) -> np.ndarray:
    return (1 << np.arange(b * b - 1, -1, -1)).astype(np.int64)


def block_codes(m, block_size: int) -> np.ndarray:
    """Integer code of every block, in row-major block order."""
    m = check_matrix(m)
    n = m.shape[0]
    check_block_size(n, block_size)
    nb = n // block_size
    blocks = m.reshape(nb, block_size, nb, block_size).transpose(0, 2, 1, 3)
    return blocks.reshape(nb * nb, block_size * block_size).astype(np.int64) @ _weights(block_size)


def block_strings(m, block_size: int) -> list[str]:
    w = block_size * block_size
    return [format(c, f"0{w}b") for c in block_codes(m, block_size).tolist()]


def _term(ctm: float, count: int) -> float:
    return ctm + math.log2(count) if count else 0.0


def bdm_terms(m, table: CtmTable, block_size: int | None = None) -> dict[str, tuple[float, int]]:
    """Per distinct block: ``(ctm_bits, multiplicity)``."""
    b = resolve_block_size(table, block_size)
    counts = Counter(block_strings(m, b))
    return {s: (table.lookup(s), n) for s, n in counts.items()}


def bdm(m, table: CtmTable, block_size: int | None = None) -> float:
    """BDM value of ``m`` in bits.

    Parameters
    ----------
    m : array_like
        Square binary matrix; its side must be a multiple of the block size.
    table : CtmTable
        CTM values for ``block_size**2``-bit strings.
    block_size : int, optional
        Block side.  Defaults to ``table.block_side``.
    """
    terms = bdm_terms(m, table, block_size)
    return sum(_term(c, n) for c, n in sorted(terms.values()))


def _check_flips(flips, n):
    seen = set()
    for r, c in flips:
        if not (0 <= r < n and 0 <= c < n):
            raise IndexError(f"flip position {(r, c)} outside {n}x{n} matrix")
        if (r, c) in seen:
            raise ValueError(f"duplicate flip position {(r, c)}")
        seen.add((r, c))


def bdm_delta(m, table: CtmTable, flips, block_size: int | None = None) -> float:
    """BDM of ``m`` with the bits at ``flips`` inverted.

    Only the blocks touched by a flip are re-read; the multiset of block
    values is updated in place of a full recomputation.
    """
    m = check_matrix(m)
    n = m.shape[0]
    b = resolve_block_size(table, block_size)
    flips = [tuple(map(int, f)) for f in flips]
    _check_flips(flips, n)
    codes = block_codes(m, b)
    ctm = table._dense(b * b)
    counts = Counter(codes.tolist())
    base = sum(_term(ctm[v], k) for v, k in sorted(counts.items()))
    if not flips:
        return base

    nb = n // b
    new_codes = {}
    for r, c in flips:
        idx = (r // b) * nb + c // b
        bit = 1 << (b * b - 1 - ((r % b) * b + c % b))
        new_codes[idx] = new_codes.get(idx, int(codes[idx])) ^ bit
    touched = set()
    updated = Counter(counts)
    for idx, code in new_codes.items():
        old = int(codes[idx])
        if code == old:
            continue
        updated[old] -= 1
        updated[code] += 1
        touched.update((old, code))
    delta = sum(_term(ctm[v], updated[v]) - _term(ctm[v], counts[v]) for v in sorted(touched))
    return base + delta


# vectorised scoring -------------------------------------------------------


def _runs(sorted_codes: np.ndarray):
    """Mask of run starts and run lengths (valid at starts) along axis 1."""
    rows, width = sorted_codes.shape
    first = np.ones((rows, width), dtype=bool)
    first[:, 1:] = sorted_codes[:, 1:] != sorted_codes[:, :-1]
    idx = np.arange(width)
    starts = np.where(first, idx, width)
    # position of the next run start strictly after j
    after = np.minimum.accumulate(starts[:, ::-1], axis=1)[:, ::-1]
    nxt = np.empty_like(after)
    nxt[:, :-1] = after[:, 1:]
    nxt[:, -1] = width
    return first, nxt - idx


def bdm_from_codes(codes: np.ndarray, ctm_values: np.ndarray) -> np.ndarray:
    """BDM of each row of block codes, shape ``(rows, n_blocks)``."""
    s = np.sort(codes, axis=1)
    first, length = _runs(s)
    terms = ctm_values[s] + np.log2(length)
    return np.where(first, terms, 0.0).sum(axis=1)


def block_entropy_from_codes(codes: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of the block-value distribution of each row."""
    s = np.sort(codes, axis=1)
    first, length = _runs(s)
    width = s.shape[1]
    p = length / width
    return -np.where(first, p * np.log2(p), 0.0).sum(axis=1)


def candidate_codes(m, flips: np.ndarray, block_size: int) -> np.ndarray:
    """Block codes of every candidate obtained by flipping ``flips``.

    ``flips`` holds flat (row-major) bit positions, shape ``(C, k)``.
    """
    m = check_matrix(m)
    n = m.shape[0]
    base = block_codes(m, block_size)
    flips = np.asarray(flips, dtype=np.int64)
    if flips.ndim == 1:
        flips = flips[:, None]
    rows, cols = np.divmod(flips, n)
    nb = n // block_size
    blk = (rows // block_size) * nb + cols // block_size
    shift = block_size * block_size - 1 - ((rows % block_size) * block_size + cols % block_size)
    mask = np.left_shift(1, shift)
    out = np.repeat(base[None, :], len(flips), axis=0)
    r = np.arange(len(flips))
    for j in range(flips.shape[1]):
        out[r, blk[:, j]] ^= mask[:, j]
    return out


def bdm_candidates(m, table: CtmTable, flips: np.ndarray, block_size: int | None = None) -> np.ndarray:
    """BDM of every candidate ``m`` with the given flat flip positions."""
    b = resolve_block_size(table, block_size)
    return bdm_from_codes(candidate_codes(m, flips, b), table._dense(b * b))
