"""
d-dimensional permutations, patterns and block sums.

A d-permutation of size n is stored as d-1 columns, column j holding the
j-th coordinate sigma(1)^(j), ..., sigma(n)^(j).  Everything user facing is
1-based; ``DPermutation.array`` is the 0-based internal view.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .seeds import rng_for

#: default enumeration limit for exhaustive pattern counting
K_MAX = 4

# rows of index subsets processed per vectorised block in ``occ``
_CHUNK = 1 << 16


class InvalidPermutation(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class TieError(ValueError):
    """Two points share a coordinate value; their pattern is undefined."""


class EnumerationLimit(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A configured size, time or evaluation budget would be exceeded."""


def validate(cols) -> list[str]:
    """Check a candidate column set (1-based). Returns a list of errors, empty if ok."""
    if isinstance(cols, DPermutation):
        cols = cols.cols
    cols = [list(c) for c in cols]
    if not cols:
        return ["empty column set"]
    n = len(cols[0])
    if n < 1:
        return ["column 1 is empty"]
    errors = []
    for j, c in enumerate(cols, start=1):
        if len(c) != n:
            errors.append(f"column {j} has length {len(c)}, expected {n}")
            continue
        seen = set()
        for v in c:
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                errors.append(f"column {j}: non-integer value {v!r}")
                break
            if not 1 <= v <= n:
                errors.append(f"column {j}: value {v} out of range 1..{n}")
                break
            if v in seen:
                errors.append(f"column {j}: duplicate value {v}")
                break
            seen.add(v)
    return errors


class DPermutation:
    """Immutable d-permutation.

    ``DPermutation(((1, 5, 2, 3, 4), (3, 2, 5, 1, 4)))`` is the 3-permutation
    i -> (i, sigma1(i), sigma2(i)).  For d=2 a single column may be given as a
    flat sequence.
    """

    __slots__ = ("_a", "_cols")

    def __init__(self, cols):
        if len(cols) and np.ndim(cols[0]) == 0:
            cols = (cols,)
        errors = validate(cols)
        if errors:
            raise InvalidPermutation(errors)
        a = np.array(cols, dtype=np.int64) - 1
        a.setflags(write=False)
        self._a = a
        self._cols = None

    @classmethod
    def from_array(cls, a):
        """Wrap a trusted 0-based array of shape (d-1, n) without validation."""
        self = cls.__new__(cls)
        a = np.array(a, dtype=np.int64)
        a.setflags(write=False)
        self._a = a
        self._cols = None
        return self

    @classmethod
    def identity(cls, n, d=2):
        return cls.from_array(np.tile(np.arange(n), (d - 1, 1)))

    @property
    def array(self):
        return self._a

    @property
    def d(self):
        return self._a.shape[0] + 1

    @property
    def n(self):
        return self._a.shape[1]

    def __len__(self):
        return self.n

    @property
    def cols(self):
        if self._cols is None:
            self._cols = tuple(tuple(int(v) + 1 for v in row) for row in self._a)
        return self._cols

    def column(self, j):
        """Column j (1-based coordinate index) as a tuple of 1-based values."""
        if not 1 <= j <= self.d - 1:
            raise ValueError(f"coordinate {j} out of range 1..{self.d - 1}")
        return self.cols[j - 1]

    def points(self):
        """The n grid points (i, sigma(i)^(1), ...) as an (n, d) array, 1-based."""
        return np.vstack([np.arange(1, self.n + 1), self._a + 1]).T

    def __eq__(self, other):
        if not isinstance(other, DPermutation):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __lt__(self, other):
        return pattern_sort_key(self) < pattern_sort_key(other)

    def __repr__(self):
        return f"DPermutation({self.cols!r})"

    def __str__(self):
        return format_pattern(self)


def as_perm(x, d=None) -> DPermutation:
    """Coerce tuples, nested sequences or pattern strings like "1,3,2|2,1,3"."""
    if isinstance(x, DPermutation):
        return x
    if isinstance(x, str):
        return parse_pattern(x)
    p = DPermutation(x)
    if d is not None and p.d != d:
        raise ValueError(f"expected dimension {d}, got {p.d}")
    return p


def format_pattern(p: DPermutation) -> str:
    return "|".join(",".join(str(v) for v in c) for c in p.cols)


def parse_pattern(text: str) -> DPermutation:
    cols = [[int(v) for v in part.split(",")] for part in text.strip().split("|")]
    return DPermutation(cols)


def pattern_sort_key(p: DPermutation):
    # lexicographic on the concatenated columns, shorter patterns first
    return (p.d, p.n, tuple(v for c in p.cols for v in c))


def _check_indices(I, n):
    idx = np.asarray(list(I), dtype=np.int64)
    if idx.ndim != 1:
        raise ValueError("index set must be one-dimensional")
    if idx.size and (idx[0] < 1 or idx[-1] > n):
        raise ValueError(f"index out of range 1..{n}")
    if np.any(np.diff(idx) <= 0):
        raise ValueError("index set must be strictly increasing")
    return idx - 1


def rank_rows(vals):
    """Ranks (0-based) along the last axis; entries along that axis must be distinct."""
    return np.argsort(np.argsort(vals, axis=-1, kind="stable"), axis=-1, kind="stable")


def pattern_at(sigma: DPermutation, I: Iterable[int]) -> DPermutation:
    """The pattern of sigma on the 1-based, strictly increasing index set I."""
    idx = _check_indices(I, sigma.n)
    if idx.size == 0:
        raise ValueError("index set is empty")
    return DPermutation.from_array(rank_rows(sigma.array[:, idx]))


def _combinations_blocks(n, k):
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), k)


def pattern_codes(sigma_array, idx):
    """Integer codes of the patterns of sigma on each row of ``idx``.

    ``idx`` has shape (m, k) with increasing rows (0-based).  The code of a
    pattern is its rank array read as a base-k number, columns first.
    """
    k = idx.shape[1]
    if k > 1 and sigma_array.shape[0] * k * np.log2(k) >= 62:
        raise EnumerationLimit(f"pattern size {k} too large for integer codes")
    sub = sigma_array[:, idx]                      # (d-1, m, k)
    r = rank_rows(sub)
    weights = k ** np.arange(r.shape[0] * k - 1, -1, -1, dtype=np.int64)
    return np.tensordot(np.moveaxis(r, 1, 0).reshape(len(idx), -1), weights, axes=1) \
        if len(idx) else np.zeros(0, dtype=np.int64)


def pattern_matches(sigma_array, idx, tau_array):
    """Boolean mask: does sigma restricted to each row of ``idx`` have pattern tau?"""
    r = rank_rows(sigma_array[:, idx])             # (d-1, m, k)
    return np.all(r == tau_array[:, None, :], axis=(0, 2))


def pattern_code(tau: DPermutation) -> int:
    return int(pattern_codes(tau.array, np.arange(tau.n)[None, :])[0])


def decode_pattern(code: int, k: int, d: int) -> DPermutation:
    digits = []
    for _ in range((d - 1) * k):
        code, r = divmod(code, k)
        digits.append(r)
    a = np.array(digits[::-1], dtype=np.int64).reshape(d - 1, k)
    return DPermutation.from_array(a)


def _pair_counts(sigma: DPermutation):
    """Counts of size-2 patterns, vectorised over all pairs."""
    a = sigma.array
    n = sigma.n
    out = {}
    for start in range(0, n, 512):
        i = np.arange(start, min(n, start + 512))
        ii, jj = np.nonzero(i[:, None] < np.arange(n)[None, :])
        ii = i[ii]
        # bit j set when coordinate j is descending on the pair
        desc = (a[:, ii] > a[:, jj]).astype(np.int64)
        code = (desc * (1 << np.arange(a.shape[0] - 1, -1, -1))[:, None]).sum(axis=0)
        for c, cnt in zip(*np.unique(code, return_counts=True)):
            out[int(c)] = out.get(int(c), 0) + int(cnt)
    return out


def occ(tau: DPermutation, sigma: DPermutation, k_max: int = K_MAX) -> int:
    """Number of index sets I with pattern_at(sigma, I) == tau."""
    tau, sigma = as_perm(tau), as_perm(sigma)
    if tau.d != sigma.d:
        raise ValueError(f"dimension mismatch: {tau.d} vs {sigma.d}")
    k, n = tau.n, sigma.n
    if k > n:
        return 0
    if k == n:
        return int(tau == sigma)
    if k == 1:
        return n
    if k == 2:
        desc = tau.array[:, 0] > tau.array[:, 1]
        code = int((desc * (1 << np.arange(len(desc) - 1, -1, -1))).sum())
        return _pair_counts(sigma).get(code, 0)
    if k > k_max:
        raise EnumerationLimit(f"pattern size {k} exceeds k_max={k_max}; use freq_sampled")
    total = 0
    for block in _combinations_blocks(n, k):
        total += int(np.count_nonzero(pattern_matches(sigma.array, block, tau.array)))
    return total


def freq(tau: DPermutation, sigma: DPermutation, k_max: int = K_MAX) -> Fraction:
    tau, sigma = as_perm(tau), as_perm(sigma)
    if tau.n > sigma.n:
        if tau.d != sigma.d:
            raise ValueError(f"dimension mismatch: {tau.d} vs {sigma.d}")
        return Fraction(0)
    return Fraction(occ(tau, sigma, k_max), comb(sigma.n, tau.n))


def pattern_table(sigma: DPermutation, k: int, k_max: int = K_MAX) -> dict:
    """occ of every pattern of size k present in sigma (absent patterns omitted)."""
    sigma = as_perm(sigma)
    if k > sigma.n:
        return {}
    if k > k_max:
        raise EnumerationLimit(f"pattern size {k} exceeds k_max={k_max}")
    counts: dict[int, int] = {}
    for block in _combinations_blocks(sigma.n, k):
        codes, cnt = np.unique(pattern_codes(sigma.array, block), return_counts=True)
        for c, m in zip(codes, cnt):
            counts[int(c)] = counts.get(int(c), 0) + int(m)
    table = {decode_pattern(c, k, sigma.d): m for c, m in counts.items()}
    return dict(sorted(table.items(), key=lambda kv: pattern_sort_key(kv[0])))


def random_subsets(rng, n, k, trials):
    """``trials`` uniform k-subsets of range(n), each row sorted."""
    if 2 * k > n:
        idx = np.argsort(rng.random((trials, n)), axis=1)[:, :k]
    else:
        idx = rng.integers(0, n, size=(trials, k))
        while True:
            s = np.sort(idx, axis=1)
            bad = np.any(s[:, 1:] == s[:, :-1], axis=1)
            if not bad.any():
                break
            idx[bad] = rng.integers(0, n, size=(int(bad.sum()), k))
    return np.sort(idx, axis=1)


def freq_sampled(tau, sigma, trials: int, seed) -> tuple[float, float]:
    """Monte Carlo estimate of freq(tau, sigma) from uniform k-subsets, with its SE."""
    tau, sigma = as_perm(tau), as_perm(sigma)
    if tau.d != sigma.d:
        raise ValueError(f"dimension mismatch: {tau.d} vs {sigma.d}")
    if trials < 1:
        raise ValueError("trials must be positive")
    k, n = tau.n, sigma.n
    if k > n:
        return 0.0, 0.0
    rng = rng_for(seed)
    hits = 0
    done = 0
    while done < trials:
        m = min(_CHUNK, trials - done)
        idx = random_subsets(rng, n, k, m)
        hits += int(np.count_nonzero(pattern_matches(sigma.array, idx, tau.array)))
        done += m
    p = hits / trials
    return p, float(np.sqrt(p * (1 - p) / trials))


class SignSequence(tuple):
    """Tuple of +1/-1 values, one per non-index coordinate."""

    def __new__(cls, signs):
        signs = tuple(int(s) for s in signs)
        if not signs or any(s not in (1, -1) for s in signs):
            raise ValueError(f"invalid sign sequence {signs!r}")
        return super().__new__(cls, signs)

    @classmethod
    def parse(cls, text):
        return cls(1 if c == "+" else -1 for c in text)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self)


def block_sum(s1: DPermutation, s2: DPermutation, s: Sequence[int]) -> DPermutation:
    """Coordinatewise direct sum (s_j = +1) or skew sum (s_j = -1)."""
    s1, s2 = as_perm(s1), as_perm(s2)
    if s1.d != s2.d:
        raise ValueError(f"dimension mismatch: {s1.d} vs {s2.d}")
    s = SignSequence(s)
    if len(s) != s1.d - 1:
        raise ValueError(f"sign sequence must have length {s1.d - 1}")
    n1, n2 = s1.n, s2.n
    out = np.empty((s1.d - 1, n1 + n2), dtype=np.int64)
    for j, sj in enumerate(s):
        if sj > 0:
            out[j, :n1] = s1.array[j]
            out[j, n1:] = s2.array[j] + n1
        else:
            out[j, :n1] = s1.array[j] + n2
            out[j, n1:] = s2.array[j]
    return DPermutation.from_array(out)


def inverse_marginal(sigma: DPermutation, j: int) -> tuple[int, ...]:
    """Inverse of column j (1-based) as a 1-based tuple."""
    col = np.asarray(as_perm(sigma).column(j)) - 1
    inv = np.empty_like(col)
    inv[col] = np.arange(len(col))
    return tuple(int(v) + 1 for v in inv)


def perm_of_points(points) -> DPermutation:
    """The d-permutation formed by k points of [0,1]^d (ties raise TieError)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2 or pts.shape[0] < 1:
        raise ValueError("points must be a non-empty (k, d) array with d >= 2")
    s = np.sort(pts, axis=0)
    if np.any(s[1:] == s[:-1]):
        raise TieError("tied coordinate values")
    order = np.argsort(pts[:, 0], kind="stable")
    return DPermutation.from_array(rank_rows(pts[order, 1:].T))
