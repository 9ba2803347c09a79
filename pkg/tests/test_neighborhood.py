import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from algevo.evolve import apply_flips, flip_sets, hamming, neighborhood, neighborhood_size
from algevo.evolve.neighborhood import candidate_fitness
from algevo.exceptions import ResourceLimitError
from algevo.matrix import complement

matrices8 = arrays(np.uint8, (8, 8), elements=st.integers(0, 1))


@pytest.mark.parametrize("k,count", [(1, 64), (2, 2016), (3, 41664)])
def test_neighborhood_sizes(k, count):
    assert neighborhood_size(8, k) == count == math.comb(64, k)
    assert len(flip_sets(8, k)) == count


def test_flip_sets_are_lexicographic_combinations():
    expect = list(itertools.combinations(range(16), 2))
    assert [tuple(r) for r in flip_sets(4, 2).tolist()] == expect


def test_lazy_neighborhood_canonical_order():
    m = np.zeros((4, 4), dtype=np.uint8)
    gen = neighborhood(m, 2)
    first = next(gen)
    assert first[0, 0] == 1 and first[0, 1] == 1 and first.sum() == 2
    rest = list(gen)
    assert len(rest) + 1 == math.comb(16, 2)
    assert all(hamming(c, m) == 2 for c in rest)


def test_hamming_examples(rng):
    m = rng.integers(0, 2, (8, 8)).astype(np.uint8)
    assert hamming(m, m) == 0
    assert hamming(m, complement(m)) == 64
    with pytest.raises(ValueError):
        hamming(m, np.zeros((4, 4), dtype=np.uint8))


@given(matrices8, matrices8)
def test_hamming_symmetric(a, b):
    assert hamming(a, b) == hamming(b, a)
    assert (hamming(a, b) == 0) == np.array_equal(a, b)


@given(matrices8, st.integers(1, 3))
def test_candidate_fitness_matches_explicit(m, k):
    target = np.zeros((8, 8), dtype=np.uint8)
    flips = flip_sets(8, k)[::97]
    fit = candidate_fitness(m, target, flips)
    for f, v in zip(flips, fit):
        assert v == hamming(apply_flips(m, f), target)


def test_apply_flips_copies():
    m = np.zeros((2, 2), dtype=np.uint8)
    c = apply_flips(m, [0, 3])
    assert m.sum() == 0 and c.tolist() == [[1, 0], [0, 1]]


def test_too_many_candidates():
    with pytest.raises(ResourceLimitError):
        flip_sets(16, 4)
    with pytest.raises(ValueError):
        flip_sets(2, 5)
    assert neighborhood_size(2, 5) == 0
