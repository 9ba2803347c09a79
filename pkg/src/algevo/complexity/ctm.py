"""Coding Theorem Method tables.

A table maps binary strings to ``-log2`` of their output frequency among
all halting machines of a given size.  Generated tables count each
machine twice, once per blank symbol: running a machine on a tape of
ones is the same as running its symbol-swapped twin on zeros and
complementing the output.  This makes the value of every string equal
to the value of its complement, and the probabilities ``2 ** -bits``
sum to one over the table.
"""
from __future__ import annotations

import hashlib
import io
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from pathlib import Path
from types import MappingProxyType

import numpy as np

from ..exceptions import DataFormatError, ResourceLimitError, UnsupportedBlockError
from .turing import PACKED_MAX_LEN, TuringMachineSpec, machine_count, run_machine, run_range

MAX_STATES = 4
DEFAULT_BUDGET = 50_000_000
CHUNK = 1 << 20

#: Environment variable naming the table file used when none is given.
TABLE_ENV = "ALGEVO_CTM_TABLE"

_HEADER_KEYS = ("states", "cap", "halting", "total", "source")


def _rebuild_table(entries, meta):
    return CtmTable(entries, **meta)


def _complement(s: str) -> str:
    return s.translate(str.maketrans("01", "10"))


class CtmTable:
    """Immutable lookup table from bitstrings to CTM values in bits.

    Parameters
    ----------
    entries : mapping of str to float
        Bitstring keys (``'0'``/``'1'`` only) and their CTM values.
    states, cap, halting, total : int
        Enumeration metadata: working states, step cap, halting machines
        and enumerated machines.  Zero for imported tables that do not
        carry them.
    source : str
        ``'generated'`` or ``'imported'``.
    """

    def __init__(self, entries, *, states=0, cap=0, halting=0, total=0, source="imported"):
        clean = {}
        for key, value in entries.items():
            if not key or set(key) - {"0", "1"}:
                raise DataFormatError(f"invalid bitstring key {key!r}")
            value = float(value)
            if not value >= 0 or math.isinf(value):
                raise DataFormatError(f"CTM value for {key!r} must be finite and >= 0, got {value}")
            clean[key] = value
        if not clean:
            raise DataFormatError("CTM table has no entries")
        self._entries = MappingProxyType(clean)
        self.states = int(states)
        self.cap = int(cap)
        self.halting = int(halting)
        self.total = int(total)
        self.source = str(source)

    @property
    def entries(self):
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def __eq__(self, other):
        if not isinstance(other, CtmTable):
            return NotImplemented
        return self.meta == other.meta and dict(self._entries) == dict(other._entries)

    # immutable: copies share the instance, pickles rebuild from the entries
    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return _rebuild_table, (dict(self._entries), self.meta)

    def __repr__(self):
        return (
            f"CtmTable(n={len(self)}, states={self.states}, cap={self.cap}, "
            f"source={self.source!r})"
        )

    @property
    def meta(self) -> dict:
        return {k: getattr(self, k) for k in _HEADER_KEYS}

    @cached_property
    def max_bits(self) -> float:
        return max(self._entries.values())

    @property
    def fallback(self) -> float:
        """Value assigned to strings absent from the table."""
        return self.max_bits + 1.0

    @cached_property
    def max_length(self) -> int:
        return max(len(k) for k in self._entries)

    @cached_property
    def median_bits(self) -> float:
        return float(np.median(list(self._entries.values())))

    def covered(self, length: int) -> bool:
        """True when every string of ``length`` bits has its own entry."""
        if length > min(self.max_length, 24):
            return False
        return sum(1 for k in self._entries if len(k) == length) == 2**length

    @cached_property
    def block_side(self) -> int:
        """Largest square block side whose flattened blocks the table supports.

        Tables holding 16-bit strings give 4 (the usual 4x4 blocks); the
        desk-scale generated tables only reach a few bits and give 2.
        """
        return max(1, math.isqrt(self.max_length))

    def lookup(self, block: str) -> float:
        """CTM value of ``block``, or :attr:`fallback` when it is absent."""
        if len(block) > self.max_length:
            raise UnsupportedBlockError(
                f"block of {len(block)} bits exceeds table maximum of {self.max_length}"
            )
        v = self._entries.get(block)
        if v is not None:
            return v
        if not block or set(block) - {"0", "1"}:
            raise ValueError(f"not a binary block: {block!r}")
        return self.fallback

    def values_for_length(self, length: int) -> np.ndarray:
        """Dense array of CTM values indexed by the integer value of each
        ``length``-bit string (most significant bit first)."""
        return self._dense(length).copy()

    def _dense(self, length: int) -> np.ndarray:
        cache = self.__dict__.setdefault("_dense_cache", {})
        if length not in cache:
            if length > self.max_length:
                raise UnsupportedBlockError(
                    f"blocks of {length} bits exceed table maximum of {self.max_length}"
                )
            if length > 24:
                raise ResourceLimitError(f"dense lookup for {length}-bit blocks is too large")
            arr = np.full(2**length, self.fallback)
            for key, value in self._entries.items():
                if len(key) == length:
                    arr[int(key, 2)] = value
            arr.setflags(write=False)
            cache[length] = arr
        return cache[length]

    # serialization -------------------------------------------------------

    def dumps(self) -> str:
        out = io.StringIO()
        out.write(
            f"ctm v1 states={self.states} cap={self.cap} halting={self.halting} "
            f"total={self.total} source={self.source}\n"
        )
        for key in sorted(self._entries, key=lambda k: (len(k), k)):
            out.write(f"{key}\t{self._entries[key]!r}\n")
        return out.getvalue()

    @classmethod
    def loads(cls, text: str, source: str | None = None) -> "CtmTable":
        lines = text.splitlines()
        if not lines:
            raise DataFormatError("empty CTM table file")
        head = lines[0].split()
        if len(head) < 2 or head[0] != "ctm" or head[1] != "v1":
            raise DataFormatError(f"bad CTM header: {lines[0]!r}")
        meta = {}
        for tok in head[2:]:
            key, sep, value = tok.partition("=")
            if not sep or key not in _HEADER_KEYS:
                raise DataFormatError(f"bad CTM header field {tok!r}")
            meta[key] = value
        missing = set(_HEADER_KEYS) - set(meta)
        if missing:
            raise DataFormatError(f"CTM header lacks {sorted(missing)}")
        entries = {}
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataFormatError(f"line {lineno}: expected '<bits>\\t<value>'")
            key, value = parts[0].strip(), parts[1].strip()
            if key in entries:
                raise DataFormatError(f"line {lineno}: duplicate key {key}")
            try:
                entries[key] = float(value)
            except ValueError:
                raise DataFormatError(f"line {lineno}: bad value {value!r}") from None
        try:
            ints = {k: int(meta[k]) for k in ("states", "cap", "halting", "total")}
        except ValueError as exc:
            raise DataFormatError(f"bad CTM header: {exc}") from None
        return cls(entries, source=source or meta["source"], **ints)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "CtmTable":
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    @cached_property
    def fingerprint(self) -> str:
        """SHA-256 of the serialized table."""
        return hashlib.sha256(self.dumps().encode()).hexdigest()


def _count_outputs(states, cap, start, stop):
    lengths, codes = run_range(states, cap, start, stop)
    halted = lengths >= 0
    packed = halted & (codes >= 0)
    counts = Counter()
    for length in np.unique(lengths[packed]).tolist():
        uniq, freq = np.unique(codes[packed & (lengths == length)], return_counts=True)
        for code, f in zip(uniq.tolist(), freq.tolist()):
            counts[format(code, f"0{length}b")] += f
    for k in np.flatnonzero(halted & (codes < 0)).tolist():
        out = run_machine(TuringMachineSpec(states, start + k), cap)
        counts[out] += 1
    return counts, int(halted.sum())


def build_ctm_table(states: int, step_cap: int, *, budget: int = DEFAULT_BUDGET,
                    threads: int = 1) -> CtmTable:
    """Enumerate every ``(states, 2)`` machine and tabulate halting outputs.

    The enumeration is split into fixed chunks of rule indices; the
    chunk results are integer counts merged by chunk index, so the table
    does not depend on ``threads``.

    Raises
    ------
    ValueError
        ``states`` outside ``1..4`` or ``step_cap < 1``.
    ResourceLimitError
        The number of machines exceeds ``budget``.
    """
    if not 1 <= states <= MAX_STATES:
        raise ValueError(f"states must be in 1..{MAX_STATES}, got {states}")
    if step_cap < 1:
        raise ValueError("step_cap must be >= 1")
    total = machine_count(states)
    if total > budget:
        raise ResourceLimitError(
            f"{total} machines for {states} states exceed the budget of {budget}"
        )
    bounds = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _count_outputs(states, step_cap, *b), bounds))
    else:
        parts = [_count_outputs(states, step_cap, *b) for b in bounds]

    raw = Counter()
    halting = 0
    for counts, h in parts:
        raw.update(counts)
        halting += h
    if halting == 0:
        raise ValueError(f"no machine halts within {step_cap} steps")
    # each output is counted once as produced and once complemented
    doubled = Counter()
    for s, c in raw.items():
        doubled[s] += c
        doubled[_complement(s)] += c
    denom = 2 * halting
    entries = {s: -math.log2(c / denom) for s, c in doubled.items()}
    return CtmTable(entries, states=states, cap=step_cap, halting=halting,
                    total=total, source="generated")


def ctm_lookup(table: CtmTable, block) -> float:
    """CTM value of a block given as a bitstring or a 0/1 array (row-major)."""
    if not isinstance(block, str):
        block = "".join(str(int(b)) for b in np.asarray(block).ravel())
    return table.lookup(block)


_DEFAULT_PATH = Path(__file__).resolve().parent.parent / "data" / "ctm_3_2_cap100.tsv"


def default_table_path() -> str:
    """``$ALGEVO_CTM_TABLE`` if set, else the bundled ``(3, 2)`` table."""
    return os.environ.get(TABLE_ENV) or str(_DEFAULT_PATH)


def default_table() -> CtmTable:
    """Table at :func:`default_table_path`, loaded once per path."""
    return _load_cached(default_table_path())


_cache: dict[str, CtmTable] = {}


def _load_cached(path: str) -> CtmTable:
    if path not in _cache:
        _cache[path] = CtmTable.load(path)
    return _cache[path]
