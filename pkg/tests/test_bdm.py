import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from _oracles import naive_bdm
from algevo.complexity import bdm, bdm_candidates, bdm_delta, bdm_terms, block_codes, block_strings
from algevo.complexity.bdm import resolve_block_size
from algevo.evolve import flip_sets
from algevo.exceptions import UnsupportedBlockError

matrices8 = arrays(np.uint8, (8, 8), elements=st.integers(0, 1))


def _oracle(m, t, b):
    return naive_bdm(m, dict(t.entries), b, t.fallback)


def test_block_order_and_encoding():
    m = np.zeros((4, 4), dtype=np.uint8)
    m[0, 1] = 1  # block (0,0), second bit
    m[3, 3] = 1  # block (1,1), last bit
    assert block_strings(m, 2) == ["0100", "0000", "0000", "0001"]
    assert block_codes(m, 2).tolist() == [4, 0, 0, 1]


def test_all_zero_8x8(table32):
    z = np.zeros((8, 8), dtype=np.uint8)
    assert bdm(z, table32) == table32.lookup("0000") + math.log2(16)


def test_all_zero_8x8_16bit_blocks(table16):
    z = np.zeros((8, 8), dtype=np.uint8)
    assert bdm(z, table16) == table16.lookup("0" * 16) + 2.0


def test_complete_graph_with_imported_table(table16):
    # two identical diagonal blocks, two all-one blocks
    m = 1 - np.eye(8, dtype=np.uint8)
    assert bdm(m, table16) == pytest.approx(28.5 + 1 + 22.0 + 1)


def test_pairwise_distinct_blocks(table32):
    m = np.zeros((4, 4), dtype=np.uint8)
    m[0:2, 2:4] = [[1, 0], [0, 0]]
    m[2:4, 0:2] = [[1, 1], [0, 0]]
    m[2:4, 2:4] = [[1, 1], [1, 0]]
    blocks = block_strings(m, 2)
    assert len(set(blocks)) == 4
    assert bdm(m, table32) == pytest.approx(sum(table32.lookup(s) for s in blocks), abs=1e-12)


@given(st.sampled_from(["0000", "0110", "1011", "1111"]), st.integers(1, 8))
def test_identical_block_additivity(block, side):
    from algevo.complexity import default_table

    t = default_table()
    tile = np.array(list(block), dtype=np.uint8).reshape(2, 2)
    m = np.tile(tile, (side, side))
    assert bdm(m, t) == t.lookup(block) + math.log2(side * side)


@settings(max_examples=60)
@given(matrices8)
def test_bdm_matches_oracle(m):
    from algevo.complexity import default_table

    t = default_table()
    assert bdm(m, t) == pytest.approx(_oracle(m, t, 2), abs=1e-9)
    assert bdm(m, t, 1) == pytest.approx(_oracle(m, t, 1), abs=1e-9)


@settings(max_examples=60)
@given(matrices8, st.randoms(use_true_random=False))
def test_bdm_invariant_under_block_permutation(m, rnd):
    from algevo.complexity import default_table

    t = default_table()
    blocks = [m[i:i + 2, j:j + 2] for i in range(0, 8, 2) for j in range(0, 8, 2)]
    rnd.shuffle(blocks)
    shuffled = np.block([blocks[r * 4:(r + 1) * 4] for r in range(4)])
    assert bdm(shuffled, t) == pytest.approx(bdm(m, t), abs=1e-9)


def test_bdm_delta_random_flips(table32, rng):
    for trial in range(1000):
        m = rng.integers(0, 2, (8, 8)).astype(np.uint8)
        k = trial % 3 + 1
        pos = rng.choice(64, size=k, replace=False)
        flips = [divmod(int(p), 8) for p in pos]
        after = m.copy()
        for r, c in flips:
            after[r, c] ^= 1
        assert bdm_delta(m, table32, flips) == pytest.approx(bdm(after, table32), abs=1e-9)


def test_bdm_delta_identity(table32, rng):
    m = rng.integers(0, 2, (8, 8)).astype(np.uint8)
    assert bdm_delta(m, table32, []) == bdm(m, table32)


def test_bdm_delta_errors(table32):
    m = np.zeros((8, 8), dtype=np.uint8)
    with pytest.raises(IndexError):
        bdm_delta(m, table32, [(8, 0)])
    with pytest.raises(ValueError):
        bdm_delta(m, table32, [(1, 1), (1, 1)])


def test_flips_in_one_block_only_touch_that_block(table32, rng):
    m = rng.integers(0, 2, (8, 8)).astype(np.uint8)
    m[0:2, 0:2] = [[1, 0], [1, 1]]  # make sure the block value is unique
    m[2:, :] = 0
    m[:2, 2:] = 0
    before = bdm_terms(m, table32)
    after_m = m.copy()
    after_m[0, 1] ^= 1
    after = bdm_terms(after_m, table32)
    changed = {s for s in set(before) | set(after) if before.get(s) != after.get(s)}
    assert changed == {"1011", "1111"}
    assert bdm_delta(m, table32, [(0, 1)]) == pytest.approx(bdm(after_m, table32), abs=1e-12)


def test_bdm_candidates_match_individual_scores(table32, rng):
    m = rng.integers(0, 2, (8, 8)).astype(np.uint8)
    for k in (1, 2):
        flips = flip_sets(8, k)[:300]
        got = bdm_candidates(m, table32, flips)
        for f, v in zip(flips, got):
            cand = m.copy().reshape(-1)
            cand[f] ^= 1
            assert v == pytest.approx(bdm(cand.reshape(8, 8), table32), abs=1e-9)


def test_block_size_resolution(table32, table16):
    assert resolve_block_size(table32, None) == 2
    assert resolve_block_size(table16, None) == 4
    with pytest.raises(UnsupportedBlockError):
        resolve_block_size(table32, 4)
    with pytest.raises(ValueError):
        bdm(np.zeros((6, 6), dtype=np.uint8), table16)


def test_invalid_matrix(table32):
    with pytest.raises(ValueError):
        bdm(np.zeros((4, 6)), table32)
    with pytest.raises(ValueError):
        bdm(np.full((4, 4), 2), table32)
