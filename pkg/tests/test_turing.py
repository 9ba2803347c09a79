import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import simulate
from algevo.complexity.turing import (
    HALT,
    LEFT,
    RIGHT,
    TuringMachineSpec,
    machine_count,
    run_machine,
    run_range,
)


@pytest.mark.parametrize("states,count", [(1, 36), (2, 10_000), (3, 7_529_536)])
def test_machine_count_formula(states, count):
    assert machine_count(states) == count == (4 * states + 2) ** (2 * states)


def test_machine_count_matches_distinct_transition_tables():
    # brute force over every transition choice for one state
    choices = [(w, 0, HALT) for w in (0, 1)] + [
        (w, mv, 1) for w in (0, 1) for mv in (LEFT, RIGHT)
    ]
    tables = {
        TuringMachineSpec.from_transitions(1, rows).rule_index
        for rows in itertools.product(choices, repeat=2)
    }
    assert tables == set(range(machine_count(1)))


def test_machine_count_rejects_zero_states():
    with pytest.raises(ValueError):
        machine_count(0)


def test_immediate_halt_writing_one():
    spec = TuringMachineSpec.from_transitions(2, {
        (1, 0): (1, 0, HALT), (1, 1): (0, 0, HALT),
        (2, 0): (0, 0, HALT), (2, 1): (0, 0, HALT),
    })
    assert run_machine(spec, 100) == "1"


def test_zero_step_budget_never_halts():
    spec = TuringMachineSpec(2, 1)  # (1, 0) halts writing 1
    assert run_machine(spec, 1) == "1"
    assert run_machine(spec, 0) is None


def test_two_state_loop_hits_the_cap():
    # 1 -> 2 -> 1 -> ... moving right then left on blank cells
    spec = TuringMachineSpec.from_transitions(2, {
        (1, 0): (0, RIGHT, 2), (1, 1): (0, RIGHT, 2),
        (2, 0): (0, LEFT, 1), (2, 1): (0, LEFT, 1),
    })
    for cap in (1, 2, 10, 1000):
        assert run_machine(spec, cap) is None


def test_output_is_visited_region():
    # write 1, move right, then halt writing 1: tape "11"
    spec = TuringMachineSpec.from_transitions(2, {
        (1, 0): (1, RIGHT, 2), (1, 1): (0, 0, HALT),
        (2, 0): (1, 0, HALT), (2, 1): (0, 0, HALT),
    })
    assert run_machine(spec, 100) == "11"
    assert run_machine(spec, 1) is None


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, machine_count(n) - 1))))
def test_encode_decode_identity(args):
    n, idx = args
    spec = TuringMachineSpec(n, idx)
    rows = [spec.transitions[q, s] for q in range(1, n + 1) for s in (0, 1)]
    assert TuringMachineSpec.from_transitions(n, rows) == spec
    assert len(spec.codes) == 2 * n and all(0 <= c < 4 * n + 2 for c in spec.codes)


def test_rule_index_out_of_range():
    with pytest.raises(ValueError):
        TuringMachineSpec(2, 10_000)
    with pytest.raises(ValueError):
        TuringMachineSpec(2, -1)


def test_invalid_transition_rejected():
    with pytest.raises(ValueError):
        TuringMachineSpec.from_transitions(1, [(2, RIGHT, 1), (0, 0, HALT)])
    with pytest.raises(ValueError):
        TuringMachineSpec.from_transitions(1, [(0, RIGHT, 2), (0, 0, HALT)])


def test_all_22_machines_agree_with_oracle():
    lengths, codes = run_range(2, 100, 0, 10_000)
    for r in range(10_000):
        expect = simulate(2, r, 100)
        got = run_machine(TuringMachineSpec(2, r), 100)
        assert got == expect, r
        if expect is None:
            assert lengths[r] == -1
        else:
            assert lengths[r] == len(expect)
            assert int(codes[r]) == int(expect, 2)


@given(st.integers(0, machine_count(3) - 1), st.integers(1, 60))
def test_33_kernel_agrees_with_oracle(idx, cap):
    lengths, codes = run_range(3, cap, idx, idx + 1)
    expect = simulate(3, idx, cap)
    if expect is None:
        assert lengths[0] == -1
    else:
        assert lengths[0] == len(expect)
        assert codes[0] == -1 or int(codes[0]) == int(expect, 2)
    assert run_machine(TuringMachineSpec(3, idx), cap) == expect


def test_run_range_is_a_slice_of_the_full_range():
    full = run_range(2, 50, 0, 10_000)
    part = run_range(2, 50, 1234, 5678)
    assert np.array_equal(full[0][1234:5678], part[0])
    assert np.array_equal(full[1][1234:5678], part[1])
