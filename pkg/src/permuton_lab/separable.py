"""
d-separable permutations through sign trees and swap trees.

Trees are plane trees stored in preorder: node 0 is the root, and
``children[v]`` lists the ids of v's children from left to right.  Leaves
carry the label ``None``.  In a sign tree every internal node carries a sign
sequence (tuple of +1/-1 of length d-1); in a swap tree the root carries a
sign sequence and the other internal nodes carry 0/1 swap sequences.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, lgamma, log, sqrt

import numpy as np

from .core import DPermutation, as_perm
from .seeds import rng_for


class NotSeparable(ValueError):
    pass


class InvalidTree(ValueError):
    pass


class RetryLimit(RuntimeError):
    pass


def _label(x):
    if x is None:
        return None
    if isinstance(x, str):
        return tuple(1 if c == "+" else (-1 if c == "-" else int(c)) for c in x)
    return tuple(int(v) for v in x)


@dataclass(frozen=True)
class PlaneTree:
    kind: str            # "sign" or "swap"
    d: int
    children: tuple      # children[v]: tuple of child ids, preorder numbering
    labels: tuple        # labels[v]: tuple or None for leaves

    @classmethod
    def build(cls, kind, d, children, labels, root=0):
        """Renumber an arbitrary node numbering into preorder."""
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(children[v]))
        new_id = {v: i for i, v in enumerate(order)}
        ch = tuple(tuple(new_id[c] for c in children[v]) for v in order)
        lab = tuple(_label(labels[v]) if children[v] else None for v in order)
        return cls(kind, d, ch, lab)

    @classmethod
    def leaf(cls, d, kind="sign"):
        return cls(kind, d, ((),), (None,))

    @classmethod
    def from_nested(cls, obj, d, kind="sign"):
        """From ``None`` (leaf) / ``(label, [children...])`` / JSON-style dicts."""
        children, labels = [], []

        def add(o):
            v = len(children)
            children.append([])
            labels.append(None)
            if o is None:
                return v
            if isinstance(o, dict):
                lab, kids = o.get("label"), o.get("children", [])
                if not kids:
                    return v
            else:
                lab, kids = o
            labels[v] = lab
            stack.append((v, list(kids)))
            return v

        stack = []
        add(obj)
        while stack:
            v, kids = stack.pop()
            children[v] = [add(k) for k in kids]
        return cls.build(kind, d, children, labels)

    def to_nested(self):
        out = [None] * len(self.children)
        for v in reversed(range(len(self.children))):
            if self.children[v]:
                out[v] = (self.labels[v], [out[c] for c in self.children[v]])
        return out[0]

    def to_json(self):
        def node(v):
            return {"label": list(self.labels[v]) if self.labels[v] is not None else None,
                    "children": [node(c) for c in self.children[v]]}
        return {"kind": self.kind, "d": self.d, "node": node(0)}

    @classmethod
    def from_json(cls, obj):
        return cls.from_nested(obj["node"], obj["d"], obj["kind"])

    @property
    def size(self):
        return len(self.children)

    def leaves(self):
        return [v for v in range(self.size) if not self.children[v]]

    @property
    def n_leaves(self):
        return sum(1 for c in self.children if not c)

    def parents(self):
        par = [-1] * self.size
        for v, cs in enumerate(self.children):
            for c in cs:
                par[c] = v
        return par

    def validate(self) -> list[str]:
        m = self.d - 1
        errors = []
        par = self.parents()
        for v, cs in enumerate(self.children):
            lab = self.labels[v]
            if not cs:
                continue
            if len(cs) < 2:
                errors.append(f"node {v} has a single child")
            if lab is None or len(lab) != m:
                errors.append(f"node {v} label {lab!r} has wrong length")
                continue
            if self.kind == "sign" or v == 0:
                if any(s not in (1, -1) for s in lab):
                    errors.append(f"node {v}: {lab!r} is not a sign sequence")
                elif self.kind == "sign" and v and self.labels[par[v]] == lab:
                    errors.append(f"node {v} repeats its parent's sign sequence")
            else:
                if any(s not in (0, 1) for s in lab):
                    errors.append(f"node {v}: {lab!r} is not a swap sequence")
                elif not any(lab):
                    errors.append(f"node {v}: all-zero swap sequence")
        return errors


# ------------------------------------------------------ decomposition

def _split_points(a):
    """Valid split points of a (0-based, shape (m, n)) with their sign sequences."""
    m, n = a.shape
    if n < 2:
        return []
    p = np.arange(1, n)
    low = np.maximum.accumulate(a, axis=1)[:, :-1] == (p - 1)
    high = np.minimum.accumulate(a, axis=1)[:, :-1] == (n - p)
    ok = np.all(low | high, axis=0)
    return [(int(q), tuple(1 if low[j, q - 1] else -1 for j in range(m)))
            for q in p[ok]]


def sign_tree(sigma) -> PlaneTree:
    """The sign tree of a separable d-permutation."""
    sigma = as_perm(sigma)
    children, labels = [[]], [None]
    stack = [(0, sigma.array)]
    while stack:
        v, a = stack.pop()
        n = a.shape[1]
        if n == 1:
            continue
        splits = _split_points(a)
        if not splits:
            raise NotSeparable(f"block of size {n} admits no block-sum split")
        s = splits[0][1]
        cuts = [0] + [q for q, t in splits if t == s] + [n]
        labels[v] = s
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            block = a[:, lo:hi]
            block = block - block.min(axis=1, keepdims=True)
            c = len(children)
            children.append([])
            labels.append(None)
            children[v].append(c)
            stack.append((c, block))
    return PlaneTree.build("sign", sigma.d, children, labels)


def is_separable(sigma) -> bool:
    try:
        sign_tree(sigma)
    except NotSeparable:
        return False
    return True


def _as_sign(T: PlaneTree) -> PlaneTree:
    return swap_to_sign(T) if T.kind == "swap" else T


def sign_tree_inverse(T: PlaneTree) -> DPermutation:
    """Read the permutation off a sign tree.

    Leaves are numbered left to right.  For coordinate j the children of
    every node whose j-th sign is -1 are reversed; the image of leaf i is its
    position in the reordered tree.
    """
    T = _as_sign(T)
    leaves = T.leaves()
    index = {v: i for i, v in enumerate(leaves)}
    out = np.empty((T.d - 1, len(leaves)), dtype=np.int64)
    for j in range(T.d - 1):
        pos = 0
        stack = [0]
        while stack:
            v = stack.pop()
            cs = T.children[v]
            if not cs:
                out[j, index[v]] = pos
                pos += 1
                continue
            stack.extend(reversed(cs) if T.labels[v][j] == 1 else cs)
    return DPermutation.from_array(out)


def sign_to_swap(T: PlaneTree) -> PlaneTree:
    if T.kind == "swap":
        return T
    par = T.parents()
    labels = list(T.labels)
    for v in range(1, T.size):
        if T.children[v]:
            pl = T.labels[par[v]]
            labels[v] = tuple(int(a != b) for a, b in zip(T.labels[v], pl))
    return PlaneTree("swap", T.d, T.children, tuple(labels))


def swap_to_sign(T: PlaneTree) -> PlaneTree:
    if T.kind == "sign":
        return T
    errors = T.validate()
    if errors:
        raise InvalidTree(errors[0])
    labels = list(T.labels)
    for v in range(T.size):              # preorder: parents come first
        for c in T.children[v]:
            if T.children[c]:
                labels[c] = tuple(-s if w else s for s, w in zip(labels[v], T.labels[c]))
    return PlaneTree("sign", T.d, T.children, tuple(labels))


def swap_tree(sigma) -> PlaneTree:
    return sign_to_swap(sign_tree(sigma))


def pattern_from_tree(T: PlaneTree, I) -> DPermutation:
    """Pattern on the leaves I (1-based) read from the induced subtree.

    The induced subtree keeps the chosen leaves and the closest common
    ancestors of pairs of them, with their original labels.
    """
    T = _as_sign(T)
    leaves = T.leaves()
    I = [int(i) for i in I]
    if not I or any(b <= a for a, b in zip(I, I[1:])) or I[0] < 1 or I[-1] > len(leaves):
        raise ValueError("leaf indices must be strictly increasing within 1..n")
    par = T.parents()
    depth = [0] * T.size
    for v in range(1, T.size):
        depth[v] = depth[par[v]] + 1

    def lca(u, v):
        while depth[u] > depth[v]:
            u = par[u]
        while depth[v] > depth[u]:
            v = par[v]
        while u != v:
            u, v = par[u], par[v]
        return u

    sel = [leaves[i - 1] for i in I]
    nodes = set(sel)
    for u, v in zip(sel, sel[1:]):
        nodes.add(lca(u, v))
    nodes = sorted(nodes)              # preorder
    kids = {v: [] for v in nodes}
    stack = []
    for v in nodes:
        while stack and lca(stack[-1], v) != stack[-1]:
            stack.pop()
        if stack:
            kids[stack[-1]].append(v)
        stack.append(v)
    sub = PlaneTree.build("sign", T.d, kids, {v: T.labels[v] for v in nodes}, root=nodes[0])
    return sign_tree_inverse(sub)


# ------------------------------------------------- Galton-Watson law

@dataclass(frozen=True)
class OffspringLaw:
    """Critical offspring law whose conditioned trees are uniform swap trees."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")

    @property
    def a(self):
        return 2 ** (self.d - 1) - 1

    @property
    def b(self):
        return 1 - sqrt(self.a / (self.a + 1))

    @property
    def p0(self):
        a = self.a
        return 1 - (sqrt(a * (a + 1)) - a)

    def pmf(self, r):
        if r == 0:
            return self.p0
        if r == 1 or r < 0:
            return 0.0
        return self.a * self.b ** (r - 1)

    def mean(self):
        return self.a * (1 / (1 - self.b) ** 2 - 1)

    def second_moment(self):
        a, b = self.a, self.b
        return a * b * (b * b - 3 * b + 4) / (1 - b) ** 3

    def variance(self):
        return self.second_moment() - 1

    def series(self, tol=1e-17):
        """Total mass, mean and variance by direct summation of the mass function."""
        mass, m1, m2 = self.p0, 0.0, 0.0
        r = 2
        while True:
            p = self.pmf(r)
            mass += p
            m1 += r * p
            m2 += r * r * p
            if r * r * p < tol:
                break
            r += 1
        return mass, m1, m2 - m1 * m1

    def sample(self, rng, size):
        """``size`` iid draws: 0 w.p. p0, else 2 + Geometric(1-b) - 1."""
        zero = rng.random(size) < self.p0
        r = rng.geometric(1 - self.b, size) + 1
        return np.where(zero, 0, r)


def offspring_law(d: int) -> OffspringLaw:
    law = OffspringLaw(d)
    mass, mean, _ = law.series()
    if abs(mass - 1) > 1e-12 or abs(mean - 1) > 1e-12 or law.variance() <= 0:
        raise ValueError(f"offspring law for d={d} failed validation")
    return law


def _children_from_lukasiewicz(word):
    """Preorder child counts -> children lists with preorder ids."""
    children = [[] for _ in word]
    stack = []
    for v, r in enumerate(word):
        if stack:
            p = stack[-1]
            children[p].append(v)
            if len(children[p]) == word[p]:
                stack.pop()
        if r:
            stack.append(v)
    return children


def _gw_rejection(law, n, rng, max_tries):
    buf = law.sample(rng, 4096)
    pos = 0
    for _ in range(max_tries):
        word = []
        pending = 1
        leaves = 0
        while pending:
            if pos == len(buf):
                buf = law.sample(rng, 4096)
                pos = 0
            r = int(buf[pos])
            pos += 1
            word.append(r)
            pending += r - 1
            if r == 0:
                leaves += 1
            if leaves + pending > n:
                break
        if pending == 0 and leaves == n:
            return word
    raise RetryLimit(f"no tree with {n} leaves after {max_tries} attempts")


def _gw_cycle(law, n, rng):
    """Exact conditioned skeleton via the cycle lemma.

    Given n leaves, a skeleton with I internal nodes has probability
    proportional to a^I; there are C(n+I, I) C(n-2, I-1) / (n+I) of them.
    """
    if n == 1:
        return [0]
    a = law.a
    Is = np.arange(1, n)
    logw = np.array([lgamma(n + i + 1) - lgamma(i + 1) - lgamma(n + 1) - log(n + i)
                     + lgamma(n - 1) - lgamma(i) - lgamma(n - i) + i * log(a) for i in Is])
    w = np.exp(logw - logw.max())
    I = int(rng.choice(Is, p=w / w.sum()))
    m = n + I
    # composition of n + I - 1 into I parts >= 2 (stars and bars)
    bars = np.sort(rng.choice(n - 2, size=I - 1, replace=False)) if I > 1 else np.zeros(0, int)
    edges = np.concatenate([[-1], bars, [n - 2]])
    parts = np.diff(edges) - 1 + 2
    word = np.zeros(m, dtype=np.int64)
    where = rng.choice(m, size=I, replace=False)
    word[np.sort(where)] = parts
    s = np.cumsum(word - 1)
    j = int(np.argmin(s))                 # first minimum of the partial sums
    return list(np.roll(word, -(j + 1)))


def sample_gw_skeleton(n, d, seed, method="rejection", max_tries=10 ** 8):
    """Children lists of a GW tree conditioned to have exactly n leaves."""
    if n < 1:
        raise ValueError("n must be positive")
    if method == "rejection" and n > 5000:
        raise ValueError("rejection sampling is capped at n <= 5000")
    law = OffspringLaw(d)
    rng = rng_for(seed)
    if method == "rejection":
        word = _gw_rejection(law, n, rng, max_tries)
    elif method == "cycle":
        word = _gw_cycle(law, n, rng)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _children_from_lukasiewicz([int(r) for r in word]), rng


def sample_uniform_swap_tree(n, d, seed, method="rejection", max_tries=10 ** 8) -> PlaneTree:
    children, rng = sample_gw_skeleton(n, d, seed, method, max_tries)
    m = d - 1
    labels = [None] * len(children)
    if children[0]:
        labels[0] = tuple(int(s) for s in rng.choice([1, -1], size=m))
    for v in range(1, len(children)):
        if children[v]:
            code = int(rng.integers(1, 2 ** m))
            labels[v] = tuple((code >> (m - 1 - j)) & 1 for j in range(m))
    return PlaneTree("swap", d, tuple(tuple(c) for c in children), tuple(labels))


def sample_uniform_separable(n, d, seed, method="rejection", max_tries=10 ** 8) -> DPermutation:
    """Uniform d-separable permutation of size n."""
    return sign_tree_inverse(swap_to_sign(sample_uniform_swap_tree(n, d, seed, method, max_tries)))


# ----------------------------------------------------- enumeration

def enumerate_sign_trees(n, d):
    """All sign trees with n leaves (independent of any permutation code)."""
    signs = list(itertools.product((1, -1), repeat=d - 1))

    def forests(total, parent_sign, min_parts):
        # ordered sequences of subtrees with `total` leaves in all
        if total == 0:
            if min_parts <= 0:
                yield []
            return
        last = total - 1 if min_parts >= 2 else total
        for first in range(1, last + 1):
            for t in trees(first, parent_sign):
                for rest in forests(total - first, parent_sign, min_parts - 1):
                    yield [t] + rest

    def trees(size, parent_sign):
        if size == 1:
            yield None
            return
        for s in signs:
            if s != parent_sign:
                for kids in forests(size, s, 2):
                    yield (s, kids)

    for t in trees(n, None):
        yield PlaneTree.from_nested(t, d)


def count_sign_trees(n, d):
    """Number of sign trees with n leaves, by the composition recursion."""
    a = 2 ** (d - 1) - 1
    A = {1: None}
    # A[m]: trees with m >= 2 leaves and a fixed root sign
    for m in range(2, n + 1):
        # sequences of >= 2 parts, part of size 1 weight 1, size s weight a*A[s]
        seq = [0] * (m + 1)       # seq[t]: sequences (>= 1 part) summing to t
        seq2 = [0] * (m + 1)      # with >= 2 parts
        for t in range(1, m + 1):
            w = lambda s: 1 if s == 1 else a * A[s]
            seq[t] = (w(t) if t < m else 0) + sum(w(s) * seq[t - s] for s in range(1, t))
            seq2[t] = sum(w(s) * seq[t - s] for s in range(1, t))
        A[m] = seq2[m]
    return 1 if n == 1 else 2 ** (d - 1) * A[n]


def enumerate_separable(n, d, max_n=6):
    """All separable d-permutations of size n, by filtering the full set."""
    from .oracle import all_d_permutations
    if n > max_n or d > 3:
        raise ValueError("enumeration capped at n <= 6, d <= 3")
    return [s for s in all_d_permutations(n, d) if is_separable(s)]


# --------------------------------------------- Brownian separable law

def _as_probs(p, d=None):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    if d is not None and len(p) != d - 1:
        raise ValueError(f"need {d - 1} probabilities")
    return p


def uniform_binary_trees(k, size, rng):
    """Remy growth, vectorised over ``size`` trees.

    Node 0 is the first leaf; step i adds internal node 2i-1 and leaf 2i.
    Returns (left, right, parent, root) arrays; leaves have left = right = -1.
    """
    N = 2 * k - 1
    left = np.full((size, N), -1, dtype=np.int64)
    right = np.full((size, N), -1, dtype=np.int64)
    parent = np.full((size, N), -1, dtype=np.int64)
    root = np.zeros(size, dtype=np.int64)
    rows = np.arange(size)
    for i in range(1, k):
        v, leaf = 2 * i - 1, 2 * i
        x = rng.integers(0, 2 * i - 1, size=size)
        side = rng.random(size) < 0.5
        p = parent[rows, x]
        at_root = p < 0
        root[at_root] = v
        nr = ~at_root
        pl = left[rows[nr], p[nr]] == x[nr]
        left[rows[nr][pl], p[nr][pl]] = v
        right[rows[nr][~pl], p[nr][~pl]] = v
        parent[:, v] = p
        left[:, v] = np.where(side, x, leaf)
        right[:, v] = np.where(side, leaf, x)
        parent[rows, x] = v
        parent[:, leaf] = v
    return left, right, parent, root


def _leaf_positions(left, right, parent, flip):
    """Position of every leaf among the leaves, children of flipped nodes reversed."""
    size, N = left.shape
    rows = np.arange(size)[:, None]
    leaves = np.arange(0, N, 2)[None, :].repeat(size, axis=0)
    nleaf = np.zeros((size, N), dtype=np.int64)
    cur = leaves.copy()
    nleaf[rows, cur] = 1
    while True:
        par = parent[rows, cur]
        alive = par >= 0
        if not alive.any():
            break
        np.add.at(nleaf, (np.broadcast_to(rows, cur.shape)[alive], par[alive]), 1)
        cur = np.where(alive, par, cur)
    pos = np.zeros(leaves.shape, dtype=np.int64)
    cur = leaves.copy()
    while True:
        par = parent[rows, cur]
        alive = par >= 0
        if not alive.any():
            break
        pr = np.where(alive, par, 0)
        second = (right[rows, pr] == cur) ^ flip[rows, pr]
        add = alive & second
        pos += np.where(add, nleaf[rows, pr] - nleaf[rows, cur], 0)
        cur = np.where(alive, par, cur)
    return pos


def brownian_pattern_arrays(k, p, size, seed):
    """``size`` samples of the size-k Brownian separable pattern, shape (size, d-1, k), 0-based."""
    p = _as_probs(p)
    rng = rng_for(seed)
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return np.zeros((size, len(p), 1), dtype=np.int64)
    left, right, parent, _ = uniform_binary_trees(k, size, rng)
    N = 2 * k - 1
    plus = rng.random((size, N, len(p))) < p       # sign +1 on internal (odd) nodes
    noflip = np.zeros((size, N), dtype=bool)
    base = _leaf_positions(left, right, parent, noflip)   # left-to-right leaf index
    out = np.empty((size, len(p), k), dtype=np.int64)
    rows = np.arange(size)[:, None]
    for j in range(len(p)):
        pos = _leaf_positions(left, right, parent, ~plus[:, :, j])
        out[rows, j, base] = pos
    return out


def sample_brownian_pattern(k, p, seed) -> DPermutation:
    """Exact sample of the size-k pattern of the Brownian separable permuton."""
    return DPermutation.from_array(brownian_pattern_arrays(k, p, 1, seed)[0])


def sample_brownian_cloud(N, p, seed) -> DPermutation:
    """Large Brownian separable pattern, used as a surrogate for the permuton."""
    return sample_brownian_pattern(N, p, seed)


def binary_plane_trees(k):
    """All binary plane trees with k leaves, as nested (label, [l, r]) with label placeholder."""
    if k == 1:
        yield None
        return
    for i in range(1, k):
        for l in binary_plane_trees(i):
            for r in binary_plane_trees(k - i):
                yield ("*", [l, r])


def catalan(m):
    return comb(2 * m, m) // (m + 1)
