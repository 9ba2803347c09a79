"""Input validation helpers shared by the functional API and the estimators."""
from __future__ import annotations

import math

import numpy as np


def check_matrix(m, name="matrix") -> np.ndarray:
    """Return ``m`` as a square ``uint8`` array of zeros and ones.

    Raises ``ValueError`` for non-square input or entries other than 0/1.
    """
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square 2D array, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return arr.astype(np.uint8, copy=False)


def check_matrices(X, name="X") -> np.ndarray:
    """Stack of square binary matrices, shape ``(n_samples, n, n)``.

    Accepts a 3D array, a sequence of matrices, or a 2D array of flattened
    matrices (``n_samples, n * n``) in the scikit-learn layout.
    """
    arr = np.asarray(X)
    if arr.ndim == 2:
        side = math.isqrt(arr.shape[1])
        if side * side != arr.shape[1]:
            raise ValueError(f"{name}: {arr.shape[1]} features is not a square matrix size")
        arr = arr.reshape(arr.shape[0], side, side)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"{name} must hold square matrices, got shape {arr.shape}")
    return np.stack([check_matrix(a, name) for a in arr]) if len(arr) else arr.astype(np.uint8)


def check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"size mismatch: {a.shape} vs {b.shape}")


def check_block_size(n: int, block_size: int):
    if block_size < 1:
        raise ValueError("block_size must be positive")
    if n % block_size:
        raise ValueError(
            f"block size {block_size} does not divide matrix size {n}; partial blocks are not supported"
        )
