"""Detection of block structures that survive across drawn mutations."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from ..complexity.bdm import block_strings, resolve_block_size
from ..complexity.ctm import CtmTable


@dataclass(frozen=True)
class PersistentStructureReport:
    """A block value found at one block position in many drawn candidates.

    ``gamma_estimate`` is ``-log2(1 - support)``: the degree ``gamma`` for
    which retaining the block with probability ``1 - 2**-gamma`` matches
    the observed support.  It is ``None`` when the support is 1.
    """

    block: str
    position: tuple[int, int]
    support: float
    gamma_estimate: float | None
    low_complexity: bool


def gamma_estimate(support: float) -> float | None:
    if not 0 <= support <= 1:
        raise ValueError("support must lie in [0, 1]")
    return None if support >= 1 else -math.log2(1 - support)


def detect_persistent_structures(drawn, table: CtmTable, support_threshold: float = 0.5,
                                 block_size: int | None = None) -> list[PersistentStructureReport]:
    """Block values whose support at a position reaches ``support_threshold``.

    ``low_complexity`` flags blocks whose CTM value is below the median of
    the table.  Reports are sorted by position, then by decreasing support.
    """
    drawn = list(drawn)
    if not drawn:
        raise ValueError("drawn set is empty")
    b = resolve_block_size(table, block_size)
    per_position: dict[int, Counter] = {}
    for m in drawn:
        for pos, s in enumerate(block_strings(m, b)):
            per_position.setdefault(pos, Counter())[s] += 1
    nb = drawn[0].shape[0] // b
    out = []
    for pos in sorted(per_position):
        for s, c in sorted(per_position[pos].items(), key=lambda kv: (-kv[1], kv[0])):
            support = c / len(drawn)
            if support >= support_threshold:
                out.append(PersistentStructureReport(
                    s, divmod(pos, nb), support, gamma_estimate(support),
                    table.lookup(s) < table.median_bits,
                ))
    return out
