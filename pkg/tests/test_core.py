import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from permuton_lab.core import (DPermutation, InvalidPermutation, TieError, block_sum,
                               format_pattern, freq, freq_sampled, inverse_marginal, occ,
                               parse_pattern, pattern_at, pattern_table, perm_of_points,
                               validate)


@st.composite
def dperms(draw, max_n=7, max_d=4):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(2, max_d))
    cols = [draw(st.permutations(range(1, n + 1))) for _ in range(d - 1)]
    return DPermutation(cols)


EXAMPLE = DPermutation(((1, 5, 2, 3, 4), (3, 2, 5, 1, 4)))


def test_validate_examples():
    assert validate(EXAMPLE.cols) == []
    assert validate(((1,), (1,))) == []
    errs = validate(((1, 1), (1, 2)))
    assert errs and "column 1" in errs[0] and "duplicate" in errs[0]
    with pytest.raises(InvalidPermutation):
        DPermutation(((1, 1), (1, 2)))
    assert validate(((1, 2), (1,)))
    assert validate(((0, 1),))


def test_pattern_at_examples():
    assert pattern_at(EXAMPLE, range(1, 6)) == EXAMPLE
    assert pattern_at(EXAMPLE, [1, 3, 5]) == DPermutation(((1, 2, 3), (1, 3, 2)))
    assert pattern_at(DPermutation(((3, 1, 2), (2, 3, 1))), [2]) == DPermutation(((1,), (1,)))
    with pytest.raises(ValueError):
        pattern_at(EXAMPLE, [3, 1])
    with pytest.raises(ValueError):
        pattern_at(EXAMPLE, [0, 2])


def test_occ_examples():
    assert occ(EXAMPLE, EXAMPLE) == 1 and freq(EXAMPLE, EXAMPLE) == 1
    assert freq(DPermutation((1, 2, 3)), DPermutation((2, 1))) == 0
    # brute force: the inversions of 32514 are (1,2),(1,4),(2,4),(3,4),(3,5)
    assert occ(DPermutation((2, 1)), DPermutation((3, 2, 5, 1, 4))) == 5


@settings(max_examples=60, deadline=None)
@given(dperms(max_n=6, max_d=3), st.integers(1, 4))
def test_occ_matches_brute_force(sigma, k):
    if k > sigma.n:
        return
    brute = {}
    for I in itertools.combinations(range(1, sigma.n + 1), k):
        t = pattern_at(sigma, I)
        brute[t] = brute.get(t, 0) + 1
    assert brute == pattern_table(sigma, k)
    for tau, m in brute.items():
        assert occ(tau, sigma) == m


@settings(max_examples=40, deadline=None)
@given(dperms(max_n=8), st.integers(1, 3))
def test_pattern_table_sums_to_binomial(sigma, k):
    assert sum(pattern_table(sigma, k).values()) == comb(sigma.n, k)


def test_freq_sampled():
    assert freq_sampled(EXAMPLE, EXAMPLE, 100, 1) == (1.0, 0.0)
    rng = np.random.default_rng(5)
    sigma = DPermutation([list(rng.permutation(20) + 1) for _ in range(2)])
    tau = DPermutation(((1, 3, 2), (2, 1, 3)))
    est, se = freq_sampled(tau, sigma, 100000, 7)
    assert abs(est - float(freq(tau, sigma))) <= 4 * se
    assert freq_sampled(tau, sigma, 5000, 9) == freq_sampled(tau, sigma, 5000, 9)


def test_block_sum_examples():
    one = DPermutation(((1,), (1,)))
    mid = DPermutation(((2, 1), (1, 2)))
    s = (1, -1)
    assert block_sum(block_sum(one, mid, s), one, s) == DPermutation(((1, 3, 2, 4), (4, 2, 3, 1)))
    assert block_sum(DPermutation.identity(2, 3), DPermutation.identity(3, 3), (1, 1)) == \
        DPermutation.identity(5, 3)
    with pytest.raises(ValueError):
        block_sum(one, DPermutation((1,)), (1, 1))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_block_sum_associative(data):
    d = data.draw(st.integers(2, 4))
    parts = [data.draw(dperms(max_n=4, max_d=d).filter(lambda p: p.d == d)) for _ in range(3)]
    s = data.draw(st.lists(st.sampled_from([1, -1]), min_size=d - 1, max_size=d - 1))
    a, b, c = parts
    assert block_sum(block_sum(a, b, s), c, s) == block_sum(a, block_sum(b, c, s), s)


def test_inverse_marginal():
    assert inverse_marginal(DPermutation((3, 2, 5, 1, 4)), 1) == (4, 2, 1, 5, 3)
    assert inverse_marginal(DPermutation.identity(4, 3), 2) == (1, 2, 3, 4)


@settings(max_examples=50, deadline=None)
@given(dperms())
def test_inverse_marginal_is_inverse(sigma):
    for j in range(1, sigma.d):
        col = sigma.column(j)
        inv = inverse_marginal(sigma, j)
        assert tuple(col[v - 1] for v in inv) == tuple(range(1, sigma.n + 1))


def test_perm_of_points():
    diag = np.tile(np.linspace(0.1, 0.9, 5)[:, None], (1, 3))
    assert perm_of_points(diag) == DPermutation.identity(5, 3)
    assert perm_of_points([(0.1, 0.9, 0.2), (0.8, 0.3, 0.7)]) == DPermutation(((2, 1), (1, 2)))
    with pytest.raises(TieError):
        perm_of_points([(0.1, 0.5), (0.2, 0.5)])


@settings(max_examples=50, deadline=None)
@given(dperms())
def test_points_round_trip_and_format(sigma):
    assert perm_of_points(sigma.points() / sigma.n) == sigma
    assert parse_pattern(format_pattern(sigma)) == sigma
    assert pattern_at(sigma, range(1, sigma.n + 1)) == sigma
