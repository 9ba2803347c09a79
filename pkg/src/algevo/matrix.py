"""Binary matrices are plain ``uint8`` numpy arrays; these helpers convert
them to and from their canonical row-major bitstring."""
from __future__ import annotations

import hashlib
import math

import numpy as np

from ._validation import check_matrix


def to_bitstring(m) -> str:
    m = check_matrix(m)
    return "".join("1" if b else "0" for b in m.ravel())


def from_bitstring(bits: str) -> np.ndarray:
    side = math.isqrt(len(bits))
    if side == 0 or side * side != len(bits) or set(bits) - {"0", "1"}:
        raise ValueError(f"not a square binary matrix bitstring: {bits[:32]!r}")
    return np.frombuffer(bits.encode(), dtype=np.uint8).reshape(side, side) - ord("0")


def complement(m) -> np.ndarray:
    return 1 - check_matrix(m)


def matrix_hash(m) -> str:
    """Short stable identifier (first 16 hex digits of SHA-1 of the bitstring)."""
    return hashlib.sha1(to_bitstring(m).encode()).hexdigest()[:16]


def to_text(m) -> str:
    """Row-major 0/1 text, one matrix row per line."""
    m = check_matrix(m)
    return "".join("".join("1" if b else "0" for b in row) + "\n" for row in m)


def from_text(text: str) -> np.ndarray:
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty matrix text")
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix text must have as many rows as columns")
    return from_bitstring("".join(rows))
