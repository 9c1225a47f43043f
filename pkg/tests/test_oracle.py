from fractions import Fraction

import pytest

from permuton_lab.core import BudgetExceeded, DPermutation
from permuton_lab.oracle import (MANIFEST, EnumerationBudget, all_d_permutations,
                                 closed_form_brownian, exact_pattern_law, shared_green_pairs,
                                 separable_by_avoidance, separable_suite, schnyder_suite, verify)

SMALL = EnumerationBudget(max_n={"perm": 3, "schnyder": 3, "separable": 3}, max_k=2)


def test_all_d_permutations():
    assert sum(1 for _ in all_d_permutations(2, 3)) == 4
    assert sum(1 for _ in all_d_permutations(3, 2)) == 6
    perms = list(all_d_permutations(3, 3))
    assert len(perms) == len(set(perms)) == 36
    with pytest.raises(BudgetExceeded):
        list(all_d_permutations(8, 3))


def test_budget_validation():
    with pytest.raises(ValueError):
        EnumerationBudget(max_k=0)
    with pytest.raises(ValueError):
        EnumerationBudget(max_n={"perm": 0})
    assert EnumerationBudget().n_for("schnyder") == 5


def test_exact_laws():
    law = exact_pattern_law(("perm", DPermutation((3, 2, 5, 1, 4))), 2)
    assert law == {DPermutation((1, 2)): Fraction(1, 2), DPermutation((2, 1)): Fraction(1, 2)}
    half = exact_pattern_law(("brownian", (0.5, 0.5)), 2)
    assert sorted(half.values()) == [Fraction(1, 4)] * 4
    cf = closed_form_brownian((0.3, 0.8))
    assert cf[DPermutation(((1, 2), (1, 2)))] == Fraction(6, 25)
    law3 = exact_pattern_law(("brownian", (0.3, 0.8)), 3)
    for tau, m in cf.items():
        if tau.n == 3:
            assert law3[tau] == m
    with pytest.raises(BudgetExceeded):
        exact_pattern_law(("brownian", (0.5, 0.5)), 5)
    with pytest.raises(ValueError):
        exact_pattern_law(("brownian", (1.5, 0.5)), 2)
    with pytest.raises(ValueError):
        exact_pattern_law(("nothing",), 2)


def test_separable_law_symmetric():
    # uniform separable d=2: the pattern 12 is as likely as 21 by symmetry
    law = exact_pattern_law(("separable", 5, 2), 2)
    assert law[DPermutation((1, 2))] == law[DPermutation((2, 1))] == Fraction(1, 2)


def test_suites():
    for n in (1, 2, 3, 4):
        problems, count = schnyder_suite(n)
        assert problems == [] and count == [1, 3, 14, 84][n - 1]
    assert len(shared_green_pairs(3)) >= 1
    for d in (2, 3):
        problems, count = separable_suite(3, d)
        assert problems == []
    assert separable_by_avoidance(DPermutation((2, 1, 3)))
    assert not separable_by_avoidance(DPermutation((2, 4, 1, 3, 5)))


def test_verify_small_budget():
    report = verify(SMALL)
    assert [r["name"] for r in report] == [name for name, _ in MANIFEST]
    for r in report:
        assert r["passed"], r
        assert set(r) == {"name", "passed", "seconds", "detail"}


def test_verify_wall_clock_cap():
    report = verify(EnumerationBudget(seconds=1e-9), names={"Schnyder golden string",
                                                             "offspring law moments"})
    assert len(report) == 2
    assert any("wall-clock" in r["detail"] for r in report)
