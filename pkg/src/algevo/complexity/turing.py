"""Small Turing machines with two symbols and an explicit halting state.

Machines follow the usual busy-beaver formalism: ``n`` working states
(numbered ``1..n``), alphabet ``{0, 1}``, a single two-way infinite tape
filled with blanks (``0``), head moves ``L``/``R`` and one extra halting
state.  Every ``(state, symbol)`` pair maps either to a move
``(write, move, next_state)`` (``4n`` choices) or to a halting
instruction that writes a symbol and stops without moving (``2``
choices).  Hence there are ``(4n + 2) ** (2n)`` machines with ``n``
states.

Rule numbering
--------------
A transition is stored as an integer code in ``[0, 4n + 2)``:

* ``0`` and ``1`` halt after writing ``0`` or ``1``;
* ``c >= 2`` encodes ``c - 2 = write + 2 * move + 4 * (next - 1)`` with
  ``move`` 0 for left and 1 for right.

The transition for state ``q`` reading ``s`` sits at slot
``j = 2 * (q - 1) + s`` and ``rule_index = sum(code_j * (4n + 2) ** j)``.

Output convention
-----------------
A machine that halts within the step budget outputs the contents of all
cells the head visited, read left to right.  Every executed transition,
the halting one included, consumes one step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numba

HALT = 0
LEFT = -1
RIGHT = 1


class Transition(NamedTuple):
    write: int
    move: int
    next_state: int


def machine_count(states: int) -> int:
    """Number of machines with ``states`` working states and two symbols."""
    if states < 1:
        raise ValueError("states must be a positive integer")
    return (4 * states + 2) ** (2 * states)


def _decode_code(code: int) -> Transition:
    if code < 2:
        return Transition(code, 0, HALT)
    c = code - 2
    move = RIGHT if (c >> 1) & 1 else LEFT
    return Transition(c & 1, move, (c >> 2) + 1)


def _encode_transition(tr: Transition, states: int) -> int:
    write, move, nxt = tr
    if write not in (0, 1):
        raise ValueError(f"write symbol must be 0 or 1, got {write}")
    if nxt == HALT:
        return write
    if move not in (LEFT, RIGHT):
        raise ValueError(f"move must be -1 (L) or 1 (R), got {move}")
    if not 1 <= nxt <= states:
        raise ValueError(f"next state {nxt} outside 1..{states}")
    return 2 + write + 2 * (move == RIGHT) + 4 * (nxt - 1)


@dataclass(frozen=True)
class TuringMachineSpec:
    """A machine identified by its index in the canonical enumeration.

    Parameters
    ----------
    states : int
        Number of working states.
    rule_index : int
        Position in the enumeration of all ``(states, 2)`` machines.
    """

    states: int
    rule_index: int

    def __post_init__(self):
        total = machine_count(self.states)
        if not 0 <= self.rule_index < total:
            raise ValueError(
                f"rule_index {self.rule_index} outside [0, {total}) for {self.states} states"
            )

    @property
    def symbols(self) -> int:
        return 2

    @property
    def codes(self) -> tuple[int, ...]:
        base = 4 * self.states + 2
        r = self.rule_index
        out = []
        for _ in range(2 * self.states):
            r, c = divmod(r, base)
            out.append(c)
        return tuple(out)

    @property
    def transitions(self) -> dict[tuple[int, int], Transition]:
        """Transition table keyed by ``(state, symbol)``."""
        return {
            (j // 2 + 1, j % 2): _decode_code(c) for j, c in enumerate(self.codes)
        }

    @classmethod
    def from_transitions(cls, states: int, table) -> "TuringMachineSpec":
        """Encode a full transition table (mapping or sequence of triples)."""
        if isinstance(table, dict):
            rows = [table[(q, s)] for q in range(1, states + 1) for s in (0, 1)]
        else:
            rows = list(table)
        if len(rows) != 2 * states:
            raise ValueError(f"expected {2 * states} transitions, got {len(rows)}")
        base = 4 * states + 2
        index = 0
        for j, tr in enumerate(rows):
            index += _encode_transition(Transition(*tr), states) * base**j
        return cls(states, index)


def run_machine(spec: TuringMachineSpec, step_cap: int) -> str | None:
    """Run ``spec`` on a blank tape.

    Returns the visited tape region as a ``'0'/'1'`` string when the
    machine halts within ``step_cap`` steps, ``None`` otherwise.
    """
    if step_cap < 0:
        raise ValueError("step_cap must be non-negative")
    table = [_decode_code(c) for c in spec.codes]
    tape: dict[int, int] = {}
    pos = lo = hi = 0
    state = 1
    for _ in range(step_cap):
        write, move, nxt = table[2 * (state - 1) + tape.get(pos, 0)]
        tape[pos] = write
        if nxt == HALT:
            return "".join(str(tape.get(p, 0)) for p in range(lo, hi + 1))
        pos += move
        state = nxt
        lo = min(lo, pos)
        hi = max(hi, pos)
    return None


# Outputs longer than this do not fit the packed int64 code and are
# re-run through run_machine by the caller.
PACKED_MAX_LEN = 62


@numba.njit(nogil=True, cache=True)
def _run_range(states, cap, start, stop):  # pragma: no cover - compiled
    base = 4 * states + 2
    width = 2 * cap + 3
    n = stop - start
    out_len = np.full(n, -1, np.int64)
    out_code = np.zeros(n, np.int64)
    tape = np.zeros(width, np.uint8)
    codes = np.zeros(2 * states, np.int64)
    for k in range(n):
        r = start + k
        for j in range(2 * states):
            codes[j] = r % base
            r //= base
        pos = cap + 1
        lo = pos
        hi = pos
        st = 0
        halted = False
        for _ in range(cap):
            c = codes[2 * st + tape[pos]]
            if c < 2:
                tape[pos] = c
                halted = True
                break
            c -= 2
            tape[pos] = c & 1
            if (c >> 1) & 1:
                pos += 1
            else:
                pos -= 1
            st = c >> 2
            if pos < lo:
                lo = pos
            if pos > hi:
                hi = pos
        if halted:
            length = hi - lo + 1
            out_len[k] = length
            if length <= 62:
                v = 0
                for p in range(lo, hi + 1):
                    v = (v << 1) | tape[p]
                out_code[k] = v
            else:
                out_code[k] = -1
        for p in range(lo, hi + 1):
            tape[p] = 0
    return out_len, out_code


def run_range(states: int, step_cap: int, start: int, stop: int):
    """Run machines ``start..stop-1`` of the enumeration.

    Returns two int64 arrays: output length (``-1`` when the machine did
    not halt) and the output packed as an integer, most significant bit
    first (``-1`` when longer than :data:`PACKED_MAX_LEN`).
    """
    if step_cap < 1:
        n = stop - start
        return np.full(n, -1, np.int64), np.zeros(n, np.int64)
    return _run_range(states, step_cap, start, stop)
