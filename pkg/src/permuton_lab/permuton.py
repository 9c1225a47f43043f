"""
Empirical permutons mu_sigma: CDF, distances, sampling and pattern statistics.

mu_sigma puts mass 1/n uniformly on the cube
((i-1)/n, i/n) x prod_j ((sigma(i)^(j)-1)/n, sigma(i)^(j)/n) for each i.
Its CDF is multilinear inside each cell of the 1/n grid, which makes
sup-norm and box distances between two such measures exactly computable on
the union of the two grids.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .core import (BudgetExceeded, DPermutation, TieError, as_perm, decode_pattern, freq,
                   pattern_codes, pattern_sort_key, perm_of_points,
                   random_subsets, rank_rows)
from .seeds import parallel_map, rng_for, stream



#: default cap on grid evaluations for exact distances
EVAL_BUDGET = 2 * 10 ** 7     # grid points; a few float arrays of this size must fit in memory


class EmpiricalPermuton:
    """The grid measure mu_sigma of a d-permutation."""

    def __init__(self, source):
        self.source = as_perm(source)
        self.d = self.source.d
        self.n = self.source.n
        # lower corners of the cubes in grid units, shape (n, d)
        self.corners = np.vstack([np.arange(self.n), self.source.array]).T

    def cdf(self, x):
        """F(x) = mu([0,x_1] x ... x [0,x_d]); x may be a point or an (m, d) array."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.d:
            raise ValueError(f"expected points of dimension {self.d}")
        if np.any((x < 0) | (x > 1)):
            raise ValueError("coordinates must lie in [0, 1]")
        out = np.empty(len(x))
        for s in range(0, len(x), 256):
            xs = x[s:s + 256]
            over = np.clip(self.n * xs[:, None, :] - self.corners[None, :, :], 0.0, 1.0)
            out[s:s + 256] = over.prod(axis=2).sum(axis=1) / self.n
        return out[0] if single else out

    def cdf_exact(self, x):
        """F(x) with rational arithmetic (x given as Fractions or ints)."""
        x = [Fraction(v) for v in x]
        total = Fraction(0)
        for c in self.corners:
            prod = Fraction(1)
            for xi, ci in zip(x, c):
                prod *= min(max(self.n * xi - int(ci), 0), 1)
                if prod == 0:
                    break
            total += prod
        return total / self.n

    def box_mass_exact(self, lo, hi):
        """mu of the box prod [lo_i, hi_i], rational."""
        lo = [Fraction(v) for v in lo]
        hi = [Fraction(v) for v in hi]
        total = Fraction(0)
        for c in self.corners:
            prod = Fraction(1)
            for a, b, ci in zip(lo, hi, c):
                ov = min(b * self.n, ci + 1) - max(a * self.n, ci)
                prod *= max(ov, 0)
                if prod == 0:
                    break
            total += prod
        return total / self.n

    def grid_table(self):
        """F on its own lattice {0, 1/n, ..., 1}^d: counts prefix sums, shape (n+1,)*d."""
        if (self.n + 1) ** self.d > EVAL_BUDGET:
            raise BudgetExceeded("lattice table exceeds the evaluation budget")
        t = np.zeros((self.n + 1,) * self.d)
        t[tuple((self.corners + 1).T)] = 1.0
        for ax in range(self.d):
            t = np.cumsum(t, axis=ax)
        return t / self.n


@dataclass
class PointCloud:
    points: np.ndarray
    seed: object = None
    tag: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if np.any((self.points < 0) | (self.points > 1)):
            raise ValueError("points must lie in [0,1]^d")

    def perm(self) -> DPermutation:
        return perm_of_points(self.points)


def _as_permuton(mu):
    return mu if isinstance(mu, EmpiricalPermuton) else EmpiricalPermuton(mu)


def _combined_grid(n1, n2):
    """Union of {a/n1} and {b/n2} as integers over L = lcm(n1, n2)."""
    L = n1 * n2 // gcd(n1, n2)
    g = np.union1d(np.arange(n1 + 1) * (L // n1), np.arange(n2 + 1) * (L // n2))
    return g, L


def _interp_axis(table, g, L, n, axis):
    """Linear interpolation of ``table`` (own 1/n lattice) onto grid g/L along ``axis``."""
    step = L // n
    lo = np.minimum(g // step, n - 1)
    w = (g - lo * step) / step
    a = np.take(table, lo, axis=axis)
    b = np.take(table, lo + 1, axis=axis)
    shape = [1] * table.ndim
    shape[axis] = len(g)
    w = w.reshape(shape)
    return a * (1 - w) + b * w


def _cdf_on_grid(mu: EmpiricalPermuton, g, L):
    t = mu.grid_table()
    for ax in range(mu.d):
        t = _interp_axis(t, g, L, mu.n, ax)
    return t


def _difference_grid(mu1, mu2, budget):
    mu1, mu2 = _as_permuton(mu1), _as_permuton(mu2)
    if mu1.d != mu2.d:
        raise ValueError(f"dimension mismatch: {mu1.d} vs {mu2.d}")
    g, L = _combined_grid(mu1.n, mu2.n)
    if len(g) ** mu1.d > budget:
        raise BudgetExceeded(f"{len(g)}^{mu1.d} grid points exceed the budget {budget}")
    return _cdf_on_grid(mu1, g, L) - _cdf_on_grid(mu2, g, L), g, L


def cdf_sup_distance(mu1, mu2, budget=EVAL_BUDGET) -> float:
    """||F1 - F2||_inf, attained on the vertices of the combined lattice."""
    D, _, _ = _difference_grid(mu1, mu2, budget)
    return float(np.abs(D).max())


def _box_sup(D, chunk=1 << 22):
    """max over lattice boxes of |inclusion-exclusion of D|.

    Boxes are pairs lo < hi on every axis.  All axes but the last are folded
    into differences D[hi] - D[lo]; along the last axis the best pair for a
    fixed slab is max - min.
    """
    if D.ndim == 1:
        return float(D.max() - D.min())
    G = D.shape[0]
    i, j = np.triu_indices(G, k=1)
    per = max(1, chunk // max(1, D[0].size))
    best = 0.0
    for s in range(0, len(i), per):
        diff = D[j[s:s + per]] - D[i[s:s + per]]
        if diff.ndim == 2:
            best = max(best, float((diff.max(axis=1) - diff.min(axis=1)).max()))
        else:
            best = max(best, max(_box_sup(x, chunk) for x in diff))
    return best


def box_distance(mu1, mu2, mode="exact", budget=EVAL_BUDGET):
    """Box distance d_box; ``mode="bound"`` returns the interval [s, 2^d s], s the CDF sup distance."""
    mu1, mu2 = _as_permuton(mu1), _as_permuton(mu2)
    if mode == "bound":
        s = cdf_sup_distance(mu1, mu2, budget)
        return (s, 2 ** mu1.d * s)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    G = len(_combined_grid(mu1.n, mu2.n)[0])
    if (G * G) ** (mu1.d - 1) * G > budget:
        raise BudgetExceeded("exact box distance exceeds the evaluation budget")
    D, _, _ = _difference_grid(mu1, mu2, budget)
    return _box_sup(D)


def box_distance_bruteforce(mu1, mu2):
    """Reference value: every lattice box of the combined grid, rational arithmetic."""
    mu1, mu2 = _as_permuton(mu1), _as_permuton(mu2)
    g, L = _combined_grid(mu1.n, mu2.n)
    pts = [Fraction(int(v), L) for v in g]
    pairs = [(a, b) for a, b in itertools.combinations(pts, 2)]
    best = Fraction(0)
    for box in itertools.product(pairs, repeat=mu1.d):
        lo = [p[0] for p in box]
        hi = [p[1] for p in box]
        best = max(best, abs(mu1.box_mass_exact(lo, hi) - mu2.box_mass_exact(lo, hi)))
    return best


# ------------------------------------------------------------ sampling

def sample_points(mu, k, seed) -> PointCloud:
    """k iid points of mu: a uniform cube, then a uniform point inside it."""
    mu = _as_permuton(mu)
    rng = rng_for(seed)
    cube = rng.integers(0, mu.n, size=k)
    pts = (mu.corners[cube] + rng.random((k, mu.d))) / mu.n
    return PointCloud(pts, seed, "empirical-permuton")


def sample_pattern(mu, k, seed, max_retries=100) -> DPermutation:
    """The random pattern P_mu[k]; ties (probability zero) trigger a resample."""
    rng = rng_for(seed)
    for _ in range(max_retries):
        try:
            return sample_points(mu, k, rng).perm()
        except TieError:
            continue
    raise TieError(f"tied coordinates in {max_retries} consecutive samples")


def _sample_pattern_arrays(mu, k, size, rng):
    """``size`` pattern rank arrays (size, d-1, k) of P_mu[k]; rows with ties are redrawn."""
    out = np.empty((size, mu.d - 1, k), dtype=np.int64)
    todo = np.arange(size)
    while len(todo):
        cube = rng.integers(0, mu.n, size=(len(todo), k))
        pts = (mu.corners[cube] + rng.random((len(todo), k, mu.d))) / mu.n
        s = np.sort(pts, axis=1)
        tied = np.any(s[:, 1:] == s[:, :-1], axis=(1, 2))
        ok = ~tied
        p = pts[ok]
        order = np.argsort(p[:, :, 0], axis=1)
        p = np.take_along_axis(p, order[:, :, None], axis=1)
        out[todo[ok]] = rank_rows(np.moveaxis(p[:, :, 1:], 2, 1))
        todo = todo[tied]
    return out


def freq_permuton(tau, mu, trials, seed):
    """Monte Carlo P(P_mu[k] = tau) with its standard error."""
    tau = as_perm(tau)
    mu = _as_permuton(mu)
    if tau.d != mu.d:
        raise ValueError("dimension mismatch")
    rng = rng_for(seed)
    hits = 0
    done = 0
    while done < trials:
        m = min(1 << 15, trials - done)
        arr = _sample_pattern_arrays(mu, tau.n, m, rng)
        hits += int(np.all(arr == tau.array[None], axis=(1, 2)).sum())
        done += m
    p = hits / trials
    return p, float(np.sqrt(p * (1 - p) / trials))


def freq_permuton_exact(tau, mu, max_n=6, max_k=3) -> Fraction:
    """P(P_mu[k] = tau) exactly, for small n and k.

    Sum over the n^k assignments of points to cubes.  Points in distinct
    cubes are ordered by their cubes in every coordinate; points sharing a
    cube are ordered, independently in each coordinate, by a uniformly random
    permutation.
    """
    tau = as_perm(tau)
    mu = _as_permuton(mu)
    n, k, d = mu.n, tau.n, mu.d
    if tau.d != d:
        raise ValueError("dimension mismatch")
    if n > max_n or k > max_k:
        raise BudgetExceeded(f"exact permuton frequency limited to n <= {max_n}, k <= {max_k}")
    target = tau.array
    total = Fraction(0)
    for cubes in itertools.product(range(n), repeat=k):
        groups = {}
        for a, c in enumerate(cubes):
            groups.setdefault(c, []).append(a)
        tied = [g for g in groups.values() if len(g) > 1]
        # a tie-break per coordinate and per shared cube
        choices = [list(itertools.permutations(g)) for g in tied for _ in range(d)]
        hits = 0
        count = 0
        for combo in itertools.product(*choices):
            count += 1
            keys = np.empty((d, k))
            for coord in range(d):
                keys[coord] = mu.corners[list(cubes), coord] * k
            for gi, g in enumerate(tied):
                for coord in range(d):
                    perm = combo[gi * d + coord]
                    for rank, a in enumerate(perm):
                        keys[coord, a] += rank
            order = np.argsort(keys[0], kind="stable")
            r = rank_rows(keys[1:, order])
            hits += bool(np.array_equal(r, target))
        total += Fraction(hits, count)
    return total / n ** k


def _small_ranks(keys):
    """Ranks along the last axis by pairwise comparison (fast for short axes)."""
    return (keys[..., None, :] < keys[..., :, None]).sum(axis=-1)


def _multiset_weights(k, d):
    """Cube multisets of size k as multiplicity patterns with tie-break offsets.

    Yields (mult, weight, offsets): mult the sorted multiplicities, weight the
    integer weight over the common denominator (k!)^(d-1) of one tie-break
    choice, and offsets an array (d, k) adding the within-cube rank in each
    coordinate.
    """
    from math import factorial as fact
    D = fact(k) ** (d - 1)
    for mult in _compositions(k):
        ways = fact(k)
        for m in mult:
            ways //= fact(m)
        per = D
        for m in mult:
            per //= fact(m) ** (d - 1)
        # coordinate 0 just labels the twins; the other coordinates order them freely
        blocks = [list(itertools.permutations(range(m))) for m in mult for _ in range(d - 1)]
        for combo in itertools.product(*blocks):
            off = np.zeros((d, k), dtype=np.int64)
            off[0] = np.concatenate([np.arange(m) for m in mult])
            pos = 0
            for bi, m in enumerate(mult):
                for j in range(d - 1):
                    off[j + 1, pos:pos + m] = combo[bi * (d - 1) + j]
                pos += m
            yield mult, ways * per, off


def _compositions(k):
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in _compositions(k - first):
            yield (first,) + rest


def _pattern_index(k, d):
    """All size-k d-permutations and a code -> column lookup (codes as in pattern_codes)."""
    from .oracle import all_d_permutations
    pats = list(all_d_permutations(k, d))
    w = k ** np.arange((d - 1) * k - 1, -1, -1, dtype=np.int64)
    lookup = np.full(k ** ((d - 1) * k), -1, dtype=np.int64)
    for i, t in enumerate(pats):
        lookup[int(t.array.reshape(-1) @ w)] = i
    return pats, w, lookup


def _occ_matrix(arrays, k):
    """occ of every size-k pattern in every permutation of the batch, shape (N, P)."""
    N, m1, n = arrays.shape
    pats, w, lookup = _pattern_index(k, m1 + 1)
    P = len(pats)
    flat = np.arange(N) * P
    occ = np.zeros(N * P, dtype=np.int64)
    for I in itertools.combinations(range(n), k):
        code = _small_ranks(arrays[:, :, list(I)]).reshape(N, -1) @ w
        occ += np.bincount(flat + lookup[code], minlength=N * P)
    return occ.reshape(N, P)


def _inflation_matrix(r, k, d):
    """M[rho, tau]: weight of tau among the inflations of the r-pattern rho to k points."""
    small, _, _ = _pattern_index(r, d)
    pats, w, lookup = _pattern_index(k, d)
    M = np.zeros((len(small), len(pats)), dtype=np.int64)
    for mult, weight, off in _multiset_weights(k, d):
        if len(mult) != r:
            continue
        for i, rho in enumerate(small):
            keys = np.repeat(rho.array, mult, axis=1) * k + off[1:]
            M[i, lookup[int(_small_ranks(keys).reshape(-1) @ w)]] += weight
    return M


def exact_law_batch(arrays, k):
    """Exact laws of P_mu[k] for a batch of empirical permutons.

    ``arrays`` has shape (N, d-1, n) (0-based d-permutations).  Returns
    (counts, patterns, denominator): counts[i, c] / denominator is the
    probability of patterns[c] under mu of the i-th permutation.

    The k points fall into a multiset of cubes.  The distinct cubes carry the
    pattern of sigma on them; a cube holding m points contributes m
    consecutive positions in every coordinate, ordered inside the cube by an
    independent uniform permutation per coordinate.
    """
    from math import factorial as fact
    arrays = np.asarray(arrays, dtype=np.int64)
    N, m1, n = arrays.shape
    d = m1 + 1
    pats, _, _ = _pattern_index(k, d)
    counts = np.zeros((N, len(pats)), dtype=np.int64)
    for r in range(1, min(k, n) + 1):
        counts += _occ_matrix(arrays, r) @ _inflation_matrix(r, k, d)
    return counts, pats, fact(k) ** (d - 1) * n ** k


def discretization_gaps(n_max=6, k_max=3, max_count=10 ** 6):
    """max over sigma, tau of |freq(tau, sigma) - freq(tau, mu_sigma)| - C(k,2)/n.

    One Fraction per (d, n, k) with d in {2, 3}, n <= n_max, k <= min(k_max, n);
    the bound holds iff every value is <= 0.
    """
    from math import comb as C
    from .oracle import all_d_permutations
    out = []
    for d in (2, 3):
        for n in range(1, n_max + 1):
            perms = np.array([s.array for s in all_d_permutations(n, d, max_count)])
            for k in range(1, min(k_max, n) + 1):
                worst = None
                for s0 in range(0, len(perms), 50000):
                    block = perms[s0:s0 + 50000]
                    counts, _, denom = exact_law_batch(block, k)
                    occ = _occ_matrix(block, k)
                    # |occ/C(n,k) - counts/denom| - C(k,2)/n, scaled by C(n,k) denom n
                    scaled = np.abs(occ * denom * n - counts * C(n, k) * n) - C(k, 2) * C(n, k) * denom
                    m = int(scaled.max())
                    worst = m if worst is None else max(worst, m)
                out.append(Fraction(worst, C(n, k) * denom * n))
    return out


def pattern_law(mu, k, trials, seed) -> dict:
    """Empirical law of P_mu[k] over ``trials`` draws."""
    mu = _as_permuton(mu)
    arr = _sample_pattern_arrays(mu, k, trials, rng_for(seed))
    return _tabulate(arr, k, mu.d)


def _tabulate(arr, k, d):
    size = len(arr)
    # codes of rank arrays directly: base-k digits, columns first
    w = k ** np.arange((d - 1) * k - 1, -1, -1, dtype=np.int64)
    codes = arr.reshape(size, -1) @ w
    vals, cnt = np.unique(codes, return_counts=True)
    law = {decode_pattern(int(c), k, d): m / size for c, m in zip(vals, cnt)}
    return dict(sorted(law.items(), key=lambda kv: pattern_sort_key(kv[0])))


# ------------------------------------------------------- diagnostics

@dataclass
class CurveRow:
    k: int
    median: float
    p90: float
    median_upper: float
    p90_upper: float
    bound: float
    reps: int


def approximation_curve(mu, ks, reps, seed, budget=EVAL_BUDGET) -> list[CurveRow]:
    """Box-distance bounds between mu and the empirical permuton of P_mu[k].

    For each k the lower end (sup-norm of the CDF difference) and the upper
    end 2^d x lower of the bound interval are summarised over reps.
    ``bound`` is d 2^(d+2) k^(-1/4).
    """
    mu = _as_permuton(mu)
    if not ks:
        raise ValueError("k list is empty")
    rows = []
    for ki, k in enumerate(ks):
        def one(r, k=k, ki=ki):
            tau = sample_pattern(mu, k, stream(seed, ki, r))
            return box_distance(mu, tau, "bound", budget)
        vals = np.array(parallel_map(one, range(reps)))
        lo, hi = vals[:, 0], vals[:, 1]
        rows.append(CurveRow(int(k), float(np.median(lo)), float(np.quantile(lo, 0.9)),
                             float(np.median(hi)), float(np.quantile(hi, 0.9)),
                             mu.d * 2 ** (mu.d + 2) * k ** -0.25, int(reps)))
    return rows


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


@dataclass
class ConvergenceReport:
    patterns: list
    rows: dict                  # pattern string -> list of {"n","mean","se","reps"}
    trends: dict                # pattern string -> "decreasing" | "increasing" | "mixed" | "flat"
    laws: dict = field(default_factory=dict)   # k -> n -> {pattern string: frequency}

    def to_json(self):
        return {
            "reports": [{"pattern": p, "rows": self.rows[p], "trend": self.trends[p]}
                        for p in self.rows],
            "laws": {str(k): {str(n): law for n, law in by_n.items()}
                     for k, by_n in self.laws.items()},
        }


def _trend(means):
    diffs = np.diff(means)
    if len(diffs) == 0 or np.all(diffs == 0):
        return "flat"
    if np.all(diffs <= 0):
        return "decreasing"
    if np.all(diffs >= 0):
        return "increasing"
    return "mixed"


def convergence_report(sampler, patterns, ns, reps, seed, trials=None,
                       law_k=(), law_samples=0) -> ConvergenceReport:
    """Mean and SE over reps of freq(tau, sigma_n), for every n and pattern.

    ``sampler(n, seed)`` returns a DPermutation.  With ``trials`` set the
    per-replicate frequency is the Monte Carlo ``freq_sampled`` estimate,
    otherwise the exact frequency.  For each k in ``law_k`` the empirical law
    of the pattern of sigma_n on a uniform k-subset is tabulated
    (``law_samples`` subsets per replicate).
    """
    from .core import format_pattern, freq_sampled
    patterns = [as_perm(p) for p in patterns]
    rows = {format_pattern(p): [] for p in patterns}
    laws = {k: {} for k in law_k}
    for ni, n in enumerate(ns):
        def one(r, n=n, ni=ni):
            sigma = sampler(n, stream(seed, ni, r, 0))
            vals = []
            for pi, tau in enumerate(patterns):
                if trials:
                    vals.append(freq_sampled(tau, sigma, trials, stream(seed, ni, r, 1, pi))[0])
                else:
                    vals.append(float(freq(tau, sigma)))
            codes = {}
            for k in law_k:
                if k <= sigma.n:
                    rng = rng_for(stream(seed, ni, r, 2, k))
                    idx = random_subsets(rng, sigma.n, k, law_samples)
                    codes[k] = pattern_codes(sigma.array, idx)
            return vals, codes, sigma.d
        out = parallel_map(one, range(reps))
        vals = np.array([o[0] for o in out]).reshape(reps, len(patterns))
        for pi, tau in enumerate(patterns):
            v = vals[:, pi]
            se = float(v.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
            rows[format_pattern(tau)].append(
                {"n": int(n), "mean": float(v.mean()), "se": se, "reps": int(reps)})
        for k in law_k:
            allc = [o[1][k] for o in out if k in o[1]]
            if not allc:
                continue
            c = np.concatenate(allc)
            vals_k, cnt = np.unique(c, return_counts=True)
            d = out[0][2]
            law = {decode_pattern(int(x), k, d): m / len(c) for x, m in zip(vals_k, cnt)}
            laws[k][int(n)] = {format_pattern(p): f for p, f in
                               sorted(law.items(), key=lambda kv: pattern_sort_key(kv[0]))}
    trends = {p: _trend([r["mean"] for r in rs]) for p, rs in rows.items()}
    return ConvergenceReport([format_pattern(p) for p in patterns], rows, trends, laws)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(float(p.get(x, 0)) - float(q.get(x, 0))) for x in keys)
