"""
Exhaustive enumerators and brute-force references.

These back every bijection and probability claim at small sizes; ``verify``
runs the full list of cross-checks (``MANIFEST``) and reports each one.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .core import (BudgetExceeded, DPermutation, freq, inverse_marginal, pattern_at, pattern_sort_key,
                   pattern_table)
from .schnyder import (CoalescentWalkProcess, build_process, count_schnyder_woods,
                       enumerate_schnyder_strings, green_tree_from_marginal,
                       pre_perm_from_string, schnyder_perm_from_string, string_to_walk,
                       trees_from_processes, walk_to_string)
from .separable import (PlaneTree, binary_plane_trees, count_sign_trees, enumerate_separable,
                        enumerate_sign_trees, is_separable, offspring_law, pattern_from_tree,
                        sign_to_swap, sign_tree, sign_tree_inverse, swap_to_sign, swap_tree)



@dataclass(frozen=True)
class EnumerationBudget:
    max_n: dict = field(default_factory=lambda: {"perm": 6, "schnyder": 5, "separable": 5})
    max_k: int = 3
    seconds: float = 600.0
    max_count: int = 10 ** 6

    def __post_init__(self):
        if self.max_k < 1 or self.seconds <= 0 or self.max_count < 1:
            raise ValueError("budget caps must be positive")
        if any(v < 1 for v in self.max_n.values()):
            raise ValueError("budget caps must be positive")

    def n_for(self, family):
        return self.max_n.get(family, 4)


def all_d_permutations(n, d, max_count=10 ** 6):
    """Every d-permutation of size n once, in lexicographic order of the concatenated columns."""
    if factorial(n) ** (d - 1) > max_count:
        raise BudgetExceeded(f"(n!)^(d-1) = {factorial(n) ** (d - 1)} exceeds {max_count}")
    perms = list(itertools.permutations(range(n)))
    for combo in itertools.product(perms, repeat=d - 1):
        yield DPermutation.from_array(np.array(combo, dtype=np.int64).reshape(d - 1, n))


# ---------------------------------------------- avoidance characterisation

def _cube_orbit(pattern):
    """All images of a 3-dimensional pattern under the 48 symmetries of the cube."""
    pattern = DPermutation(pattern) if not isinstance(pattern, DPermutation) else pattern
    pts = pattern.points() - 1
    k = pattern.n
    out = set()
    for axes in itertools.permutations(range(3)):
        for flips in itertools.product((False, True), repeat=3):
            q = pts[:, axes]
            q = np.where(flips, k - 1 - q, q)
            q = q[np.argsort(q[:, 0])]
            out.add(DPermutation.from_array(q[:, 1:].T))
    return out


SEPARABLE_2D_OBSTRUCTIONS = (DPermutation((2, 4, 1, 3)), DPermutation((3, 1, 4, 2)))
SEPARABLE_3D_OBSTRUCTIONS = frozenset(_cube_orbit(((1, 3, 2), (2, 1, 3))))


def _marginal(sigma: DPermutation, coords):
    pts = sigma.points()[:, list(coords)]
    pts = pts[np.argsort(pts[:, 0])]
    return DPermutation.from_array(np.argsort(np.argsort(pts[:, 1:], axis=0), axis=0).T)


def separable_by_avoidance(sigma) -> bool:
    """Separability through the marginal pattern-avoidance characterisation."""
    sigma = DPermutation(sigma) if not isinstance(sigma, DPermutation) else sigma
    d = sigma.d
    for pair in itertools.combinations(range(d), 2):
        table = pattern_table(_marginal(sigma, pair), 4)
        if any(p in table for p in SEPARABLE_2D_OBSTRUCTIONS):
            return False
    for triple in itertools.combinations(range(d), 3):
        table = pattern_table(_marginal(sigma, triple), 3)
        if any(p in SEPARABLE_3D_OBSTRUCTIONS for p in table):
            return False
    return True


# ------------------------------------------------------ exact pattern laws

def _fraction(x):
    return x if isinstance(x, Fraction) else Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def _brownian_law(p, k):
    p = [_fraction(x) for x in p]
    m = len(p)
    trees = list(binary_plane_trees(k))
    w_tree = Fraction(1, len(trees))
    law = {}
    for nested in trees:
        T = PlaneTree.from_nested(_relabel(nested, (1,) * m), m + 1)
        internal = [v for v in range(T.size) if T.children[v]]
        for signs in itertools.product(itertools.product((1, -1), repeat=m), repeat=len(internal)):
            labels = list(T.labels)
            w = w_tree
            for v, s in zip(internal, signs):
                labels[v] = s
                for pj, sj in zip(p, s):
                    w *= pj if sj == 1 else 1 - pj
            if w == 0:
                continue
            tau = sign_tree_inverse(PlaneTree("sign", T.d, T.children, tuple(labels)))
            law[tau] = law.get(tau, 0) + w
    return law


def _relabel(nested, label):
    if nested is None:
        return None
    return (label, [_relabel(c, label) for c in nested[1]])


def exact_pattern_law(source, k, max_k=4) -> dict:
    """Exact law (pattern -> Fraction) of a size-k sampled pattern.

    source is one of
      ("brownian", p)          the Brownian separable permuton with sign probabilities p,
                               summed over uniform binary plane trees and iid signs;
      ("separable", n, d)      pattern of a uniform d-separable permutation of size n
                               on a uniform k-subset of its indices;
      ("perm", sigma)          pattern of a fixed permutation on a uniform k-subset.
    Floats in p are read through their decimal repr, so 0.3 means 3/10.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > max_k:
        raise BudgetExceeded(f"exact pattern laws are limited to k <= {max_k}")
    kind = source[0]
    if kind == "brownian":
        p = source[1]
        p = [p] if isinstance(p, (int, float, Fraction)) else list(p)
        if any(not 0 <= _fraction(x) <= 1 for x in p):
            raise ValueError("probabilities must lie in [0, 1]")
        law = _brownian_law(p, k)
    elif kind == "separable":
        n, d = source[1], source[2]
        perms = enumerate_separable(n, d)
        law = {}
        for s in perms:
            for tau, m in pattern_table(s, k).items():
                law[tau] = law.get(tau, 0) + Fraction(m, comb(n, k) * len(perms))
    elif kind == "perm":
        s = source[1] if isinstance(source[1], DPermutation) else DPermutation(source[1])
        law = {tau: Fraction(m, comb(s.n, k)) for tau, m in pattern_table(s, k).items()}
    else:
        raise ValueError(f"unknown law source {kind!r}")
    return dict(sorted(law.items(), key=lambda kv: pattern_sort_key(kv[0])))


def closed_form_brownian(p):
    """The small closed-form masses used as acceptance targets, keyed by pattern."""
    p1, p2 = (_fraction(x) for x in p)
    return {
        DPermutation(((1, 2), (1, 2))): p1 * p2,
        DPermutation(((1, 2, 3), (1, 2, 3))): p1 ** 2 * p2 ** 2,
        DPermutation(((1, 2, 3), (1, 3, 2))): p1 ** 2 * p2 * (1 - p2) / 2,
    }


# ------------------------------------------------------------- manifest

def _golden_string():
    s = "gbggbgrgbrrgbbbgbrrggbrrrgbbrr"
    sigma = schnyder_perm_from_string(s)
    ok = (inverse_marginal(sigma, 1) == (10, 6, 1, 5, 3, 4, 9, 8, 2, 7)
          and inverse_marginal(sigma, 2) == (8, 7, 2, 10, 9, 4, 6, 5, 3, 1))
    return ok, str(sigma)


def _example_paths():
    Z = CoalescentWalkProcess.from_paths(
        8, {2: [0, 2, 2, 0, 2, 1, 0], 3: [0, -1, 0, 2, 1, 0], 5: [0, 2, 1, 0], 7: [0, -2]},
        {2: 1, 3: 2, 5: 3, 7: 4})
    up, down = Z.sigma_up(), Z.sigma_down()
    return up == (4, 3, 2, 1) and down == (2, 3, 1, 4), f"up={up} down={down}"


def schnyder_suite(n):
    """Every bijection and agreement check on all Schnyder woods of size n."""
    strings = enumerate_schnyder_strings(n)
    problems = []
    seen = {}
    for s in strings:
        w = string_to_walk(s)
        if walk_to_string(w) != s or w.validate():
            problems.append(f"round trip {s}")
        Zg, Zr = build_process(w, "green"), build_process(w, "red")
        fast = DPermutation((Zg.sigma_up("sweep"), Zr.sigma_down("sweep")))
        slow = DPermutation((Zg.sigma_up("definition"), Zr.sigma_down("definition")))
        if fast != slow:
            problems.append(f"sweep/definition {s}")
        if pre_perm_from_string(s) != fast:
            problems.append(f"pre-processes {s}")
        if fast in seen:
            problems.append(f"collision {s} {seen[fast]}")
        seen[fast] = s
        tg, tr = trees_from_processes(Zg, Zr)
        if green_tree_from_marginal(inverse_marginal(fast, 1)) != tg:
            problems.append(f"green tree {s}")
        if any(p >= v for v, p in tg.parent.items() if p):
            problems.append(f"green edge order {s}")
        if not (tg.is_valid() and tr.is_valid()):
            problems.append(f"forest {s}")
        if tg.traversal() != inverse_marginal(fast, 1) or tr.traversal() != inverse_marginal(fast, 2):
            problems.append(f"traversal {s}")
    if len(strings) != count_schnyder_woods(n):
        problems.append(f"count {len(strings)} != {count_schnyder_woods(n)}")
    return problems, len(strings)


def shared_green_pairs(n=3):
    """Pairs of woods of size n sharing the green marginal but not the red one."""
    by_green = {}
    for s in enumerate_schnyder_strings(n):
        sigma = schnyder_perm_from_string(s)
        by_green.setdefault(sigma.column(1), []).append((s, sigma.column(2)))
    return [(a[0], b[0]) for group in by_green.values()
            for a, b in itertools.combinations(group, 2) if a[1] != b[1]]


def separable_suite(n, d):
    problems = []
    perms = enumerate_separable(n, d)
    for s in perms:
        T = sign_tree(s)
        if sign_tree_inverse(T) != s or swap_to_sign(sign_to_swap(T)) != T:
            problems.append(f"round trip {s}")
        if sign_tree_inverse(swap_tree(s)) != s:
            problems.append(f"swap {s}")
        for k in range(1, min(3, n) + 1):
            for I in itertools.combinations(range(1, n + 1), k):
                if pattern_from_tree(T, I) != pattern_at(s, I):
                    problems.append(f"pattern {s} {I}")
    trees = list(enumerate_sign_trees(n, d))
    if sorted(sign_tree_inverse(T) for T in trees) != sorted(perms):
        problems.append("tree enumeration disagrees with the filter")
    if len(perms) != count_sign_trees(n, d):
        problems.append(f"count {len(perms)} != {count_sign_trees(n, d)}")
    for s in all_d_permutations(n, d):
        if is_separable(s) != separable_by_avoidance(s):
            problems.append(f"avoidance {s}")
    return problems, len(perms)


def _check_occ(budget):
    n = min(budget.n_for("perm"), 5)
    bad = 0
    for d in (2, 3):
        for s in all_d_permutations(n, d, budget.max_count):
            for k in range(1, min(budget.max_k, 3) + 1):
                brute = {}
                for I in itertools.combinations(range(1, n + 1), k):
                    t = pattern_at(s, I)
                    brute[t] = brute.get(t, 0) + 1
                if brute != pattern_table(s, k):
                    bad += 1
    return bad == 0, f"n={n} mismatches={bad}"


def _check_schnyder(budget):
    out = []
    for n in range(1, budget.n_for("schnyder") + 1):
        problems, count = schnyder_suite(n)
        if problems:
            return False, f"n={n}: {problems[:3]}"
        out.append(count)
    return True, f"woods per n: {out}"


def _check_separable(budget):
    out = []
    for d in (2, 3):
        for n in range(1, budget.n_for("separable") + 1):
            if factorial(n) ** (d - 1) > budget.max_count:
                break
            problems, count = separable_suite(n, d)
            if problems:
                return False, f"d={d} n={n}: {problems[:3]}"
            out.append((d, n, count))
    d2 = [c for d, n, c in out if d == 2]
    ok = d2 == [1, 2, 6, 22, 90][:len(d2)]
    return ok, f"counts {out}"


def _check_offspring(budget):
    worst = 0.0
    for d in range(2, 9):
        law = offspring_law(d)
        mass, mean, var = law.series()
        worst = max(worst, abs(mass - 1), abs(mean - 1), abs(law.mean() - 1),
                    abs(var - law.variance()))
    return worst < 1e-10, f"max error {worst:.2e}"


def _check_brownian(budget):
    k_top = min(budget.max_k, 3)
    for p in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(3, 10), Fraction(4, 5))):
        laws = {k: exact_pattern_law(("brownian", p), k) for k in range(1, k_top + 1)}
        if any(sum(law.values()) != 1 for law in laws.values()):
            return False, f"mass at p={p}"
        for tau, mass in closed_form_brownian(p).items():
            if tau.n <= k_top and laws[tau.n].get(tau, 0) != mass:
                return False, f"{tau} at p={p}"
    half = exact_pattern_law(("brownian", (0.5, 0.5)), 2)
    ok = len(half) == 4 and all(v == Fraction(1, 4) for v in half.values())
    return ok, f"k <= {k_top}"


def _check_discretization_bound(budget):
    """|freq(tau, sigma) - freq(tau, mu_sigma)| <= C(k,2)/n for every sigma with n <= 6, k <= 3, d in {2, 3}."""
    from .permuton import discretization_gaps
    worst = max(discretization_gaps(min(budget.n_for("perm"), 6), min(budget.max_k, 3), budget.max_count))
    return worst <= 0, f"max(|gap| - C(k,2)/n) = {worst}"


def _check_distances(budget):
    from .permuton import (EmpiricalPermuton, box_distance, box_distance_bruteforce,
                           cdf_sup_distance, exact_law_batch, freq_permuton_exact)
    a, b = DPermutation((1, 2)), DPermutation((2, 1))
    if not (cdf_sup_distance(a, b) == 0.5 and box_distance(a, b) == 0.5
            and box_distance_bruteforce(a, b) == Fraction(1, 2)):
        return False, "2x2 values"
    rng = np.random.default_rng(2024)
    for _ in range(60):
        d = int(rng.integers(2, 4))
        n1, n2 = (int(x) for x in rng.integers(1, 7 - d, size=2))
        s1 = DPermutation.from_array(np.array([rng.permutation(n1) for _ in range(d - 1)]))
        s2 = DPermutation.from_array(np.array([rng.permutation(n2) for _ in range(d - 1)]))
        sup, box = cdf_sup_distance(s1, s2), box_distance(s1, s2)
        if abs(box - float(box_distance_bruteforce(s1, s2))) > 1e-12:
            return False, f"box distance {s1} {s2}"
        if not sup - 1e-12 <= box <= 2 ** d * sup + 1e-12:
            return False, f"sandwich {s1} {s2}"
        k = int(rng.integers(1, 4))
        counts, pats, denom = exact_law_batch(s1.array[None], k)
        mu = EmpiricalPermuton(s1)
        if any(Fraction(int(c), denom) != freq_permuton_exact(t, mu) for c, t in zip(counts[0], pats)):
            return False, f"exact permuton law {s1} k={k}"
    return True, "60 random pairs"


def _check_cone_counts(budget):
    from .schnyder import _cone_dp
    cat = lambda m: comb(2 * m, m) // (m + 1)
    for n in range(1, 40):
        if count_schnyder_woods(n) != cat(n) * cat(n + 2) - cat(n + 1) ** 2:
            return False, f"n={n}"
    worst = max(abs(_cone_dp(n).p_excursion * 16 ** n / count_schnyder_woods(n) - 1)
                for n in (1, 2, 5, 20, 40))
    return worst < 1e-9, f"float DP relative error {worst:.1e}"


MANIFEST = [
    ("all_d_permutations sizes", lambda b: (
        [sum(1 for _ in all_d_permutations(n, d)) for n, d in ((2, 3), (3, 2), (3, 3))] == [4, 6, 36],
        "n=2,d=3 / n=3,d=2 / n=3,d=3")),
    ("occ table vs brute force", _check_occ),
    ("Schnyder golden string", lambda b: _golden_string()),
    ("coalescent orders from explicit paths", lambda b: _example_paths()),
    ("Schnyder exhaustive bijections", _check_schnyder),
    ("equal green / distinct red marginals at n=3", lambda b: (len(shared_green_pairs(3)) >= 1,
                                                               f"{len(shared_green_pairs(3))} pairs")),
    ("Schnyder counts and float DP", _check_cone_counts),
    ("separable exhaustive bijections", _check_separable),
    ("offspring law moments", _check_offspring),
    ("Brownian separable exact laws", _check_brownian),
    ("permuton distances and exact laws", _check_distances),
    ("pattern frequencies of sigma vs mu_sigma", _check_discretization_bound),
]


def verify(budget: EnumerationBudget | None = None, names=None) -> list[dict]:
    """Run the cross-checks in MANIFEST; each entry reports pass/fail and timing."""
    budget = budget or EnumerationBudget()
    start = time.perf_counter()
    report = []
    for name, check in MANIFEST:
        if names is not None and name not in names:
            continue
        if time.perf_counter() - start > budget.seconds:
            report.append({"name": name, "passed": False, "seconds": 0.0,
                           "detail": "not run: wall-clock cap reached"})
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = check(budget)
        except Exception as exc:          # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.append({"name": name, "passed": bool(ok),
                       "seconds": round(time.perf_counter() - t0, 4), "detail": detail})
    return report
