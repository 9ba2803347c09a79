"""Deterministic random streams.

Every stream is a numpy ``Generator`` over the PCG64 bit generator.  The
seed material is a ``SeedSequence`` built from a master seed and a tuple
of non-negative integer keys (``spawn_key``), so replicate ``i`` of
target ``j`` under arm ``c`` always gets the same stream, whatever the
order in which replicates are run.
"""
from __future__ import annotations

import numpy as np


def mix_seed(master: int, *keys: int) -> int:
    """64-bit seed derived from ``master`` and ``keys`` via ``SeedSequence``."""
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """``Generator(PCG64)`` for ``seed``; extra ``keys`` select a sub-stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
