import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy import stats

from permuton_lab.core import DPermutation, pattern_at, pattern_table
from permuton_lab.oracle import (all_d_permutations, closed_form_brownian, exact_pattern_law,
                                 separable_by_avoidance)
from permuton_lab.separable import (InvalidTree, NotSeparable, OffspringLaw, PlaneTree,
                                    binary_plane_trees, brownian_pattern_arrays, catalan,
                                    count_sign_trees, enumerate_separable, enumerate_sign_trees,
                                    is_separable, offspring_law, pattern_from_tree,
                                    sample_brownian_pattern, sample_gw_skeleton,
                                    sample_uniform_separable, sample_uniform_swap_tree,
                                    sign_to_swap, sign_tree, sign_tree_inverse, swap_to_sign,
                                    swap_tree, uniform_binary_trees)


def test_block_sum_example_tree():
    # 1 (+) 21 (+) 1 with signs (+, -): two levels of the tree
    sigma = DPermutation(((1, 3, 2, 4), (4, 2, 3, 1)))
    T = sign_tree(sigma)
    assert T.labels[0] == (1, -1)
    assert len(T.children[0]) == 3
    assert sign_tree_inverse(T) == sigma
    assert PlaneTree.from_json(T.to_json()) == T
    S = sign_to_swap(T)
    assert S.kind == "swap" and swap_to_sign(S) == T
    leaf, inner, last = T.children[0]
    assert not T.children[leaf] and not T.children[last]
    assert T.labels[inner] == (-1, 1) and len(T.children[inner]) == 2
    assert S.labels[inner] == (1, 1)
    assert pattern_from_tree(T, [2, 4]) == DPermutation(((1, 2), (2, 1)))
    assert sign_tree_inverse(PlaneTree.leaf(3)) == DPermutation(((1,), (1,)))


def test_not_separable():
    with pytest.raises(NotSeparable):
        sign_tree(DPermutation((2, 4, 1, 3)))
    assert not is_separable(DPermutation((3, 1, 4, 2)))
    assert not is_separable(DPermutation(((1, 3, 2), (2, 1, 3))))
    assert is_separable(DPermutation((1,)))


def test_counts():
    assert [count_sign_trees(n, 2) for n in range(1, 6)] == [1, 2, 6, 22, 90]
    assert [count_sign_trees(n, 3) for n in range(1, 6)] == [1, 4, 28, 244, 2380]
    for d in (2, 3):
        for n in range(1, 5 if d == 3 else 6):
            assert len(enumerate_separable(n, d)) == count_sign_trees(n, d)
            assert len(list(enumerate_sign_trees(n, d))) == count_sign_trees(n, d)


@pytest.mark.parametrize("d,n", [(2, 4), (2, 5), (3, 3), (3, 4)])
def test_exhaustive_round_trips_and_patterns(d, n):
    perms = enumerate_separable(n, d)
    for s in perms:
        T = sign_tree(s)
        assert sign_tree_inverse(T) == s
        assert sign_tree_inverse(swap_tree(s)) == s
        assert swap_to_sign(sign_to_swap(T)) == T
        for k in range(1, 4):
            for I in itertools.combinations(range(1, n + 1), k):
                assert pattern_from_tree(T, I) == pattern_at(s, I)
    assert sorted(sign_tree_inverse(T) for T in enumerate_sign_trees(n, d)) == sorted(perms)


@pytest.mark.parametrize("d,n", [(2, 5), (3, 4)])
def test_avoidance_oracle(d, n):
    for s in all_d_permutations(n, d):
        assert is_separable(s) == separable_by_avoidance(s)


def test_swap_tree_validation():
    T = sign_to_swap(sign_tree(DPermutation(((1, 3, 2, 4), (4, 2, 3, 1)))))
    labels = list(T.labels)
    v = next(v for v in range(1, T.size) if T.children[v])
    labels[v] = (0, 0)
    bad = PlaneTree("swap", T.d, T.children, tuple(labels))
    assert bad.validate()
    with pytest.raises(InvalidTree):
        swap_to_sign(bad)


@pytest.mark.parametrize("d", range(2, 9))
def test_offspring_moments(d):
    law = offspring_law(d)
    mass, mean, var = law.series()
    assert abs(mass - 1) < 1e-10
    assert abs(mean - 1) < 1e-10 and abs(law.mean() - 1) < 1e-10
    assert abs(var - law.variance()) < 1e-10
    assert law.pmf(1) == 0 and law.pmf(0) > 0 and law.pmf(2) > 0


def test_offspring_sampler_moments():
    law = OffspringLaw(3)
    x = law.sample(np.random.default_rng(0), 400000)
    assert abs(x.mean() - 1) < 5 * np.sqrt(law.variance() / len(x))
    assert not np.any(x == 1)


@pytest.mark.parametrize("n,method", [(3, "rejection"), (4, "rejection"), (3, "cycle"), (4, "cycle")])
def test_conditioned_sampler_uniform(n, method):
    d = 3
    index = {swap_tree(s): i for i, s in enumerate(enumerate_separable(n, d))}
    N = 100000
    counts = np.zeros(len(index))
    rng = np.random.default_rng(1000 * n + len(method))
    for _ in range(N):
        counts[index[sample_uniform_swap_tree(n, d, rng, method=method)]] += 1
    assert stats.chisquare(counts).pvalue > 0.001


def test_sampler_sizes_and_determinism():
    for method in ("rejection", "cycle"):
        for n in (1, 2, 17, 300):
            T = sample_uniform_swap_tree(n, 3, 7, method=method)
            assert T.n_leaves == n and T.validate() == []
            assert sample_uniform_swap_tree(n, 3, 7, method=method) == T
    sigma = sample_uniform_separable(500, 4, 3, method="cycle")
    assert sigma.n == 500 and sigma.d == 4 and is_separable(sigma)
    with pytest.raises(ValueError):
        sample_gw_skeleton(6000, 3, 0)


def test_binary_trees_uniform():
    for k in range(1, 6):
        assert len(list(binary_plane_trees(k))) == catalan(k - 1)
    k, N = 5, 140000
    left, right, parent, root = uniform_binary_trees(k, N, np.random.default_rng(2))

    def shape(row, v):
        if left[row, v] < 0:
            return ()
        return (shape(row, left[row, v]), shape(row, right[row, v]))
    counts = Counter(shape(r, root[r]) for r in range(N))
    assert len(counts) == catalan(k - 1)
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


@pytest.mark.parametrize("p", [(0.5, 0.5), (0.3, 0.8)])
def test_brownian_closed_forms_monte_carlo(p):
    N = 200000
    for k in (2, 3):
        law = exact_pattern_law(("brownian", p), k)
        arr = brownian_pattern_arrays(k, p, N, 5 + k)
        found = Counter(DPermutation.from_array(a) for a in np.unique(arr, axis=0))
        assert set(found) <= set(law)
        for tau, mass in closed_form_brownian(p).items():
            if tau.n != k:
                continue
            assert law[tau] == mass
            hit = np.all(arr == tau.array[None], axis=(1, 2)).mean()
            se = np.sqrt(float(mass) * (1 - float(mass)) / N)
            assert abs(hit - float(mass)) <= 4 * se


def test_brownian_law_properties():
    for k in (1, 2, 3):
        law = exact_pattern_law(("brownian", (Fraction(1, 3), Fraction(3, 4), Fraction(1, 2))), k)
        assert sum(law.values()) == 1
    assert exact_pattern_law(("brownian", (1, 1)), 3) == {DPermutation.identity(3, 3): 1}
    assert sample_brownian_pattern(4, (1, 0), 0) == DPermutation(((1, 2, 3, 4), (4, 3, 2, 1)))
    assert sample_brownian_pattern(1, (0.5, 0.5), 0) == DPermutation(((1,), (1,)))
    big = sample_brownian_pattern(300, (0.4, 0.7), 9)
    assert big.n == 300 and is_separable(big)


def test_separable_law_exact_small():
    # the pattern law of uniform separable permutations sums to one
    law = exact_pattern_law(("separable", 4, 2), 3)
    assert sum(law.values()) == 1
    assert set(law) <= {t for t in pattern_table(DPermutation((1, 2, 3)), 3)} | \
        {DPermutation(p) for p in itertools.permutations((1, 2, 3))}


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_sampled_trees_round_trip(n, d, seed):
    T = sample_uniform_swap_tree(n, d, seed)
    sigma = sign_tree_inverse(T)
    assert swap_tree(sigma) == T
    rng = np.random.default_rng(seed)
    k = min(n, 3)
    I = sorted(rng.choice(n, size=k, replace=False) + 1)
    assert pattern_from_tree(T, I) == pattern_at(sigma, I)
