"""
Acceptance criteria, one check per criterion.

    pytest -v -s tests/test_acceptance.py     # as tests
    python3 tests/test_acceptance.py          # as a report, one PASS/FAIL line each
"""
import sys
import time

import numpy as np
import pytest
from scipy import stats

from permuton_lab.core import DPermutation, decode_pattern, freq, inverse_marginal, pattern_codes, random_subsets
from permuton_lab.oracle import (closed_form_brownian, exact_pattern_law, shared_green_pairs,
                                 schnyder_suite, separable_suite)
from permuton_lab.permuton import (EmpiricalPermuton, approximation_curve, box_distance,
                                   cdf_sup_distance, discretization_gaps, loglog_slope, total_variation)
from permuton_lab.schnyder import (CoalescentWalkProcess, build_process, enumerate_schnyder_strings,
                                   sample_uniform_schnyder_batch, schnyder_perm_from_string,
                                   string_to_walk)
from permuton_lab.seeds import rng_for, stream
from permuton_lab.separable import (brownian_pattern_arrays, enumerate_separable, offspring_law,
                                    sample_uniform_swap_tree, sign_tree_inverse, swap_tree)

GOLDEN = "gbggbgrgbrrgbbbgbrrggbrrrgbbrr"
INVERSION = DPermutation((2, 1))


def c1_golden():
    def pipeline():
        w = string_to_walk(GOLDEN)
        zg, zr = build_process(w, "green"), build_process(w, "red")
        sigma = DPermutation((zg.sigma_up(), zr.sigma_down()))
        return inverse_marginal(sigma, 1), inverse_marginal(sigma, 2)
    g, r = pipeline()
    ok = g == (10, 6, 1, 5, 3, 4, 9, 8, 2, 7) and r == (8, 7, 2, 10, 9, 4, 6, 5, 3, 1)
    times = []
    for _ in range(20):
        t0 = time.perf_counter()
        pipeline()
        times.append(time.perf_counter() - t0)
    ms = 1e3 * float(np.median(times))
    return ok and ms < 1, f"green^-1={g} red^-1={r} median {ms:.3f} ms"


def c2_paths():
    Z = CoalescentWalkProcess.from_paths(
        8, {2: [0, 2, 2, 0, 2, 1, 0], 3: [0, -1, 0, 2, 1, 0], 5: [0, 2, 1, 0], 7: [0, -2]},
        {2: 1, 3: 2, 5: 3, 7: 4})
    up, down = Z.sigma_up(), Z.sigma_down()
    return up == (4, 3, 2, 1) and down == (2, 3, 1, 4), f"up={up} down={down}"


def c3_schnyder_bijections():
    t0 = time.perf_counter()
    counts, problems = [], []
    for n in range(1, 6):
        p, c = schnyder_suite(n)
        problems += p
        counts.append(c)
    secs = time.perf_counter() - t0
    return not problems and secs < 60, f"woods {counts}, problems {problems[:3]}, {secs:.1f} s"


def c4_equal_green():
    pairs = shared_green_pairs(3)
    s, t = pairs[0] if pairs else (None, None)
    ok = bool(pairs)
    if ok:
        a, b = schnyder_perm_from_string(s), schnyder_perm_from_string(t)
        ok = a.column(1) == b.column(1) and a.column(2) != b.column(2)
    return ok, f"{len(pairs)} pairs among {len(enumerate_schnyder_strings(3))} woods, e.g. {s} / {t}"


def _mean_inversions(n, size, seed):
    vals = [float(freq(INVERSION, DPermutation(schnyder_perm_from_string(s).column(1))))
            for s in sample_uniform_schnyder_batch(n, size, seed)]
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(size))


def c5_inversions():
    t0 = time.perf_counter()
    small, se_small = _mean_inversions(100, 400, 101)
    big, se_big = _mean_inversions(1600, 400, 1601)
    secs = time.perf_counter() - t0
    ok = abs(big - 2 / 3) < 0.05 and abs(big - 2 / 3) < abs(small - 2 / 3) and secs <= 600
    return ok, (f"n=100: {small:.4f} (se {se_small:.4f}); n=1600: {big:.4f} (se {se_big:.4f}); "
                f"target 2/3; {secs:.0f} s")


def c6_separable_suite():
    t0 = time.perf_counter()
    out, problems = {}, []
    for d in (2, 3):
        for n in range(1, 6):
            p, c = separable_suite(n, d)
            problems += p
            out.setdefault(d, []).append(c)
    secs = time.perf_counter() - t0
    ok = not problems and out[2] == [1, 2, 6, 22, 90] and secs < 60
    return ok, f"counts d=2 {out[2]} d=3 {out[3]}, problems {problems[:3]}, {secs:.1f} s"


def c7_offspring():
    worst = 0.0
    for d in range(2, 9):
        law = offspring_law(d)
        mass, mean, var = law.series()
        worst = max(worst, abs(mass - 1), abs(mean - 1), abs(var - law.variance()))
    pvals = []
    rng = rng_for(7)
    for n in (3, 4):
        index = {swap_tree(s): i for i, s in enumerate(enumerate_separable(n, 3))}
        counts = np.zeros(len(index))
        for _ in range(10 ** 5):
            counts[index[sample_uniform_swap_tree(n, 3, rng)]] += 1
        pvals.append(stats.chisquare(counts).pvalue)
    ok = worst < 1e-10 and min(pvals) > 0.001
    return ok, f"max moment error {worst:.1e}; chi-squared p at n=3,4: {pvals[0]:.3f}, {pvals[1]:.3f}"


def c8_brownian():
    N, chunk = 10 ** 6, 250000
    lines, ok = [], True
    for pi, p in enumerate(((0.5, 0.5), (0.3, 0.8))):
        targets = closed_form_brownian(p)
        for k in (2, 3):
            law = exact_pattern_law(("brownian", p), k)
            hits = {tau: 0 for tau in targets if tau.n == k}
            for c in range(N // chunk):
                arr = brownian_pattern_arrays(k, p, chunk, stream(8, pi, k, c))
                for tau in hits:
                    hits[tau] += int(np.all(arr == tau.array[None], axis=(1, 2)).sum())
            for tau, h in hits.items():
                m = float(targets[tau])
                est, se = h / N, np.sqrt(m * (1 - m) / N)
                z = (est - m) / se
                ok &= abs(z) <= 4 and law[tau] == targets[tau]
                lines.append(f"p={p} {tau}: {est:.5f} vs {targets[tau]} (z={z:+.2f})")
            ok &= sum(law.values()) == 1
    return ok, "; ".join(lines)


def _tv_separable(n, N, seed, limit):
    rng = rng_for(stream(seed, n, N))   # subsets: one stream past the tree streams
    codes = np.empty(N, dtype=np.int64)
    for i in range(N):
        sigma = sign_tree_inverse(sample_uniform_swap_tree(n, 3, stream(seed, n, i), method="cycle"))
        codes[i] = pattern_codes(sigma.array, random_subsets(rng, n, 3, 1))[0]
    vals, cnt = np.unique(codes, return_counts=True)
    emp = {decode_pattern(int(v), 3, 3): c / N for v, c in zip(vals, cnt)}
    return total_variation(emp, limit)


def c9_separable_trend():
    limit = {tau: float(m) for tau, m in exact_pattern_law(("brownian", (0.5, 0.5)), 3).items()}
    ns = (50, 200, 1000)
    tv = [_tv_separable(n, 10 ** 4, 9, limit) for n in ns]
    ok = tv[0] > tv[1] > tv[2]
    return ok, "TV " + ", ".join(f"n={n}: {v:.4f}" for n, v in zip(ns, tv))


def _random_perm(rng, n, d):
    return DPermutation.from_array(np.array([rng.permutation(n) for _ in range(d - 1)]))


def c10_permuton():
    details, ok = [], True
    gaps = discretization_gaps(6, 3)
    ok &= max(gaps) <= 0
    details.append(f"frequency bound: every sigma with n <= 6, d in {{2,3}}, k <= 3 "
                   f"({len(gaps)} (d, n, k) classes), max(gap - C(k,2)/n) = {max(gaps)}")

    rng = np.random.default_rng(10)
    bad_lip = bad_sand = 0
    for _ in range(5000):
        d = int(rng.integers(2, 5))
        mu = EmpiricalPermuton(_random_perm(rng, int(rng.integers(1, 9)), d))
        x, y = rng.random((2, d))
        if abs(float(mu.cdf(y)) - float(mu.cdf(x))) > np.abs(y - x).sum() + 1e-12:
            bad_lip += 1
    for _ in range(5000):
        d = int(rng.integers(2, 4))
        top = 5 if d == 2 else 4
        s1 = _random_perm(rng, int(rng.integers(1, top)), d)
        s2 = _random_perm(rng, int(rng.integers(1, top)), d)
        sup, box = cdf_sup_distance(s1, s2), box_distance(s1, s2)
        if not sup - 1e-12 <= box <= 2 ** d * sup + 1e-12:
            bad_sand += 1
    ok &= bad_lip == 0 and bad_sand == 0
    details.append(f"Lipschitz failures {bad_lip}/5000, sandwich failures {bad_sand}/5000")

    base = _random_perm(np.random.default_rng(64), 64, 2)
    ks = [64, 256, 1024, 4096]
    rows = approximation_curve(EmpiricalPermuton(base), ks, 9, 10)
    med = [r.median for r in rows]
    slope = loglog_slope(ks, med)
    weak = all(b <= a for a, b in zip(med, med[1:]))
    ok &= weak and -0.6 <= slope <= -0.1
    details.append("curve medians " + ", ".join(f"{m:.4f}" for m in med) + f", slope {slope:.3f}")
    return ok, "; ".join(details)


CRITERIA = [
    (1, "golden Schnyder pipeline", c1_golden),
    (2, "coalescent orders from explicit paths", c2_paths),
    (3, "exhaustive Schnyder bijections n <= 5", c3_schnyder_bijections),
    (4, "equal green, distinct red marginal at n = 3", c4_equal_green),
    (5, "Schnyder inversion frequency near 2/3", c5_inversions),
    (6, "exhaustive separable suite n <= 5", c6_separable_suite),
    (7, "offspring law and conditioned sampler", c7_offspring),
    (8, "Brownian separable pattern probabilities", c8_brownian),
    (9, "separable pattern-law convergence trend", c9_separable_trend),
    (10, "mu_sigma frequency bound, Lipschitz, sandwich, approximation curve", c10_permuton),
]


def report(number, title, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  [{time.perf_counter() - t0:.1f}s]  {detail}"
    return ok, line


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = report(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for c in CRITERIA:
        ok, line = report(*c)
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
