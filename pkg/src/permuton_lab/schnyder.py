"""
Schnyder wood strings, cone walks and coalescent-walk processes.

A Schnyder wood of size n is handled through its g/b/r string (length 3n),
the associated cone walk (2n steps, each (1,-1) or (-k,1)), and the green
and red coalescent-walk processes driven by that walk.  The 3-permutation of
the wood is (sigma^up of the green process, sigma^down of the red process).
"""
from __future__ import annotations

import random
import threading
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cmp_to_key, lru_cache

import numpy as np
from scipy.signal import lfilter

from .core import BudgetExceeded, DPermutation
from .seeds import rng_for


class InvalidString(ValueError):
    pass


class InvalidWalk(ValueError):
    pass



class RetryLimit(RuntimeError):
    pass


# ---------------------------------------------------------------- strings

def validate_string(s: str) -> list[str]:
    """Errors for a candidate Schnyder wood string; empty when valid.

    Reports only the first failing prefix.
    """
    if len(s) == 0 or len(s) % 3:
        return [f"length {len(s)} is not a positive multiple of 3"]
    n = len(s) // 3
    cg = cb = cr = 0
    for i, c in enumerate(s):
        if c == "g":
            cg += 1
        elif c == "b":
            cb += 1
        elif c == "r":
            cr += 1
        else:
            return [f"position {i + 1}: invalid character {c!r}"]
        if not cg >= cb >= cr:
            return [f"prefix of length {i + 1} violates #g >= #b >= #r"]
        if c == "b" and i and s[i - 1] == "r":
            return [f"position {i}: r immediately followed by b"]
    if not cg == cb == cr == n:
        return [f"character counts g={cg}, b={cb}, r={cr} are not all {n}"]
    return []


def check_string(s: str) -> str:
    errors = validate_string(s)
    if errors:
        raise InvalidString(errors[0])
    return s


@dataclass(frozen=True)
class ConeWalk:
    """2n increments (1,-1) or (-k,1) started at the origin."""

    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((int(a), int(b)) for a, b in self.steps))

    @property
    def n(self):
        return len(self.steps) // 2

    def positions(self):
        p = np.zeros((len(self.steps) + 1, 2), dtype=np.int64)
        if self.steps:
            p[1:] = np.cumsum(np.array(self.steps, dtype=np.int64), axis=0)
        return p

    def reversed(self):
        """The time reversal W': increments reversed in order and negated."""
        return tuple((-a, -b) for a, b in reversed(self.steps))

    def validate(self) -> list[str]:
        n = self.n
        if len(self.steps) == 0 or len(self.steps) % 2:
            return ["number of steps must be a positive even number"]
        nb = 0
        for i, (a, b) in enumerate(self.steps):
            if (a, b) == (1, -1):
                nb += 1
            elif not (b == 1 and a <= 0):
                return [f"step {i + 1}: invalid increment {(a, b)}"]
        if nb != n:
            return [f"expected {n} steps (1,-1), found {nb}"]
        pos = self.positions()
        bad = np.nonzero((pos[:, 0] < 0) | (pos[:, 1] < -1))[0]
        if bad.size:
            return [f"time {bad[0]}: position {tuple(pos[bad[0]])} leaves the cone"]
        if tuple(pos[-1]) != (0, 0):
            return [f"walk ends at {tuple(pos[-1])}, not at the origin"]
        return []


def string_to_walk(s: str) -> ConeWalk:
    check_string(s)
    t = s[1:] + s[0]
    steps = []
    k = 0
    for c in t:
        if c == "b":
            steps.append((1, -1))
        elif c == "r":
            k += 1
        else:
            steps.append((-k, 1))
            k = 0
    return ConeWalk(tuple(steps))


def walk_to_string(w: ConeWalk) -> str:
    if not isinstance(w, ConeWalk):
        w = ConeWalk(tuple(w))
    errors = w.validate()
    if errors:
        raise InvalidWalk(errors[0])
    parts = []
    for a, b in w.steps:
        parts.append("b" if b == -1 else "r" * (-a) + "g")
    t = "".join(parts)
    return t[-1] + t[:-1]


def enumerate_schnyder_strings(n: int, max_n: int = 6) -> list[str]:
    """All Schnyder wood strings of size n, by pruned depth-first search."""
    if n < 1:
        return []
    if n > max_n:
        raise BudgetExceeded(f"enumeration of size {n} exceeds the cap {max_n}")
    out = []
    buf = []

    def rec(cg, cb, cr, last):
        if cr == n:
            out.append("".join(buf))
            return
        if cg < n:
            buf.append("g"); rec(cg + 1, cb, cr, "g"); buf.pop()
        if cb < cg and last != "r":
            buf.append("b"); rec(cg, cb + 1, cr, "b"); buf.pop()
        if cr < cb:
            buf.append("r"); rec(cg, cb, cr + 1, "r"); buf.pop()

    rec(0, 0, 0, "")
    return out


# ---------------------------------------------------------- processes

def green_rule(z, step):
    a, b = step
    if b == -1:            # (k,-1)
        if z > 0:
            return z - 1
        if z < 0:
            return z - a
        return z - a - 1
    return z + 1           # (-1,1)


def red_rule(z, step):
    a, b = step
    if b == 1:             # (-k,1)
        if z >= 0:
            return z + 1
        return min(z - a, 0)
    return z - 1           # (1,-1)


@dataclass
class RootedForest:
    """Plane forest on labels 1..n hanging from a root labelled 0."""

    kind: str
    parent: dict
    order: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.parent)

    def children(self, v):
        return self.order.get(v, ())

    def traversal(self):
        """Labels in depth-first preorder, children visited in stored order."""
        out = []
        stack = list(reversed(self.children(0)))
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children(v)))
        return tuple(out)

    def is_valid(self):
        n = self.n
        if set(self.parent) != set(range(1, n + 1)):
            return False
        for v in self.parent:
            seen = set()
            while v != 0:
                if v in seen:
                    return False
                seen.add(v)
                v = self.parent[v]
        listed = sorted(c for cs in self.order.values() for c in cs)
        return listed == list(range(1, n + 1))

    def to_json(self):
        return {
            "root": self.kind,
            "parent": {str(k): int(v) for k, v in sorted(self.parent.items())},
            "order": {str(k): [int(c) for c in v] for k, v in sorted(self.order.items())},
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            kind=obj["root"],
            parent={int(k): int(v) for k, v in obj["parent"].items()},
            order={int(k): tuple(v) for k, v in obj["order"].items()},
        )

    def __eq__(self, other):
        if not isinstance(other, RootedForest):
            return NotImplemented
        norm = lambda o: {k: tuple(v) for k, v in o.items() if v}
        return self.parent == other.parent and norm(self.order) == norm(other.order)


def _forest(kind, parent, rank):
    order = {}
    for v, p in parent.items():
        order.setdefault(p, []).append(v)
    order = {p: tuple(sorted(cs, key=lambda c: rank[c])) for p, cs in order.items()}
    return RootedForest(kind, dict(sorted(parent.items())), dict(sorted(order.items())))


class CoalescentWalkProcess:
    """Walks Z^(j), j in J, on the time interval [0, length].

    Either driven by a step sequence and an update rule (``rule(z, step)``),
    or given by explicit path values (``from_paths``).  Each start j carries
    a label; sigma^up / sigma^down are indexed by labels.
    """

    def __init__(self, length, starts, labels, steps=None, rule=None, variant="custom"):
        self.length = int(length)
        self.starts = tuple(sorted(int(j) for j in starts))
        self.labels = dict(labels)
        self.steps = steps
        self.rule = rule
        self.variant = variant
        self._paths = {}
        self._lock = threading.Lock()
        self._sweeps = {}
        if sorted(self.labels) != list(self.starts):
            raise ValueError("labels must be given for exactly the starting points")

    @classmethod
    def from_paths(cls, length, paths, labels):
        """A process given by explicit values: paths[j] lists Z^(j)_t for t = j..length."""
        self = cls(length, paths.keys(), labels)
        for j, vals in paths.items():
            vals = np.asarray(vals, dtype=np.int64)
            if len(vals) != self.length - j + 1 or vals[0] != 0:
                raise ValueError(f"path from {j} must start at 0 and cover [{j}, {length}]")
            self._paths[int(j)] = vals
        return self

    @property
    def n(self):
        return len(self.starts)

    def path(self, j):
        """Values of Z^(j) at times j, j+1, ..., length."""
        j = int(j)
        if j not in self.labels:
            raise ValueError(f"{j} is not a starting point")
        with self._lock:
            p = self._paths.get(j)
        if p is None:
            vals = np.zeros(self.length - j + 1, dtype=np.int64)
            z = 0
            for i, t in enumerate(range(j, self.length)):
                z = self.rule(z, self.steps[t])
                vals[i + 1] = z
            vals.setflags(write=False)
            with self._lock:
                p = self._paths.setdefault(j, vals)
        return p

    def value(self, j, t):
        if t < j or t > self.length:
            raise ValueError(f"time {t} outside [{j}, {self.length}]")
        return int(self.path(j)[t - j])

    # -- orders

    def _cmp(self, up):
        def cmp(j1, j2):
            if j1 == j2:
                return 0
            lo, hi = (j1, j2) if j1 < j2 else (j2, j1)
            z = self.value(lo, hi)
            lo_first = z < 0 if up else z > 0
            first = lo if lo_first else hi
            return -1 if first == j1 else 1
        return cmp

    def order(self, direction="up", method="auto"):
        """Starting points sorted by the up (or down) order."""
        up = direction == "up"
        if method == "auto":
            method = "sweep" if self.rule is not None else "definition"
        if method == "definition":
            return tuple(sorted(self.starts, key=cmp_to_key(self._cmp(up))))
        return self._sweep(up)[0]

    def _perm(self, order):
        sigma = [0] * self.n
        for rank, j in enumerate(order, start=1):
            sigma[self.labels[j] - 1] = rank
        return tuple(sigma)

    def sigma_up(self, method="auto"):
        return self._perm(self.order("up", method))

    def sigma_down(self, method="auto"):
        return self._perm(self.order("down", method))

    def _sweep(self, up):
        """One pass in time keeping coalesced paths as groups sorted by height.

        Heights of distinct groups stay strictly ordered (non-crossing), so
        the up order lists groups bottom to top and the down order top to
        bottom; a new start at height 0 goes right before the group already
        at 0.  Also records the first start point each path runs into.
        """
        key = bool(up)
        with self._lock:
            if key in self._sweeps:
                return self._sweeps[key]
        if self.rule is None:
            raise ValueError("sweep needs a rule-driven process")
        starts = set(self.starts)
        nxt = {}
        groups = []          # [height, head, tail, roots], ascending heights
        parent = {}
        for t in range(self.length + 1):
            if t in starts:
                i = bisect_left(groups, 0, key=lambda g: g[0])
                if i < len(groups) and groups[i][0] == 0:
                    g = groups[i]
                    for r in g[3]:
                        parent[r] = t
                    nxt[t] = g[1]
                    g[1] = t
                    g[3] = [t]
                else:
                    groups.insert(i, [0, t, t, [t]])
            if t == self.length:
                break
            step = self.steps[t]
            merged = []
            for g in groups:
                g[0] = self.rule(g[0], step)
                if merged and merged[-1][0] == g[0]:
                    lower = merged[-1]
                    if up:       # lower members precede upper members
                        nxt[lower[2]] = g[1]
                        lower[2] = g[2]
                    else:
                        nxt[g[2]] = lower[1]
                        lower[1] = g[1]
                    lower[3].extend(g[3])
                else:
                    merged.append(g)
            groups = merged
        out = []
        for g in (groups if up else reversed(groups)):
            v = g[1]
            while True:
                out.append(v)
                if v == g[2]:
                    break
                v = nxt[v]
            for r in g[3]:
                parent[r] = None
        result = (tuple(out), parent)
        with self._lock:
            self._sweeps[key] = result
        return result

    def forest(self, direction, kind=None):
        """Tree of first hits: i -> j when the path labelled i first meets start j."""
        order, hits = self._sweep(direction == "up")
        rank = {self.labels[j]: r for r, j in enumerate(order)}
        parent = {self.labels[i]: (0 if j is None else self.labels[j]) for i, j in hits.items()}
        return _forest(kind or self.variant, parent, rank)


def build_process(w: ConeWalk, variant: str) -> CoalescentWalkProcess:
    """Green process on the reversed walk W', or red process on W."""
    if not isinstance(w, ConeWalk):
        w = ConeWalk(tuple(w))
    n, T = w.n, len(w.steps)
    if variant == "green":
        steps = w.reversed()
        J = [t for t in range(T) if steps[t][1] == -1]
        J = sorted(T if t == 0 else t for t in J)
        labels = {j: n - i for i, j in enumerate(J)}
        return CoalescentWalkProcess(T, J, labels, steps, green_rule, "green")
    if variant == "red":
        steps = w.steps
        J = [t for t in range(1, T + 1) if steps[t - 1][1] == 1]
        J = sorted(0 if t == T else t for t in J)
        labels = {j: i + 1 for i, j in enumerate(J)}
        return CoalescentWalkProcess(T, J, labels, steps, red_rule, "red")
    raise ValueError(f"unknown variant {variant!r}")


def path_eval(Z: CoalescentWalkProcess, j, t) -> int:
    return Z.value(j, t)


def sigma_up(Z: CoalescentWalkProcess, method="auto"):
    return Z.sigma_up(method)


def sigma_down(Z: CoalescentWalkProcess, method="auto"):
    return Z.sigma_down(method)


def processes_from_string(s: str):
    w = string_to_walk(s)
    return build_process(w, "green"), build_process(w, "red")


def schnyder_perm_from_string(s: str, method="auto") -> DPermutation:
    Zg, Zr = processes_from_string(s)
    return DPermutation((Zg.sigma_up(method), Zr.sigma_down(method)))


def trees_from_processes(Zg: CoalescentWalkProcess, Zr: CoalescentWalkProcess):
    return Zg.forest("up", "green"), Zr.forest("down", "red")


def green_tree_from_marginal(seq) -> RootedForest:
    """Green tree rebuilt from the blue labels listed in green order.

    Keeps the path a_1 < ... < a_m from the root to the last inserted vertex;
    a new label v hangs from the root when v < a_1, otherwise from the largest
    a_j below v.
    """
    path = []
    parent = {}
    order = {}
    for v in seq:
        v = int(v)
        i = bisect_left(path, v)
        p = 0 if i == 0 else path[i - 1]
        del path[i:]
        path.append(v)
        parent[v] = p
        order.setdefault(p, []).append(v)
    return RootedForest("green", dict(sorted(parent.items())),
                        {p: tuple(c) for p, c in sorted(order.items())})


# ---------------------------------------------------- pre-processes

def pre_processes(s: str):
    """Half-step pre-green and pre-red processes of a string.

    Times and heights are doubled so that every quantity is an integer: the
    returned processes live on [0, 6n] and start at odd (doubled) times.
    """
    check_string(s)
    N = len(s)
    inc = {"g": (0, 1), "b": (1, -1), "r": (-1, 0)}
    fwd = [inc[c] for c in s]
    rev = [(-a, -b) for a, b in reversed(fwd)]
    T = 2 * N

    def half(z, a, b):
        return z + b if z >= 0 else z - a

    def run(steps, j, red):
        vals = [0]
        z = 0
        for u in range(j, T):
            m = u // 2
            a, b = steps[m]
            if (red and z == 0 and u % 2 == 0 and 0 < m and steps[m - 1] == (-1, 0)
                    and steps[m] != (-1, 0)):
                pass             # one extra half step at zero after a run of (-1,0)
            else:
                z = half(z, a, b)
            vals.append(z)
        return vals

    def make(steps, want, red):
        J = [2 * m + 1 for m in range(N) if steps[m] == want]
        paths = {j: run(steps, j, red) for j in J}
        n = len(J)
        labels = {j: (i + 1 if red else n - i) for i, j in enumerate(J)}
        return CoalescentWalkProcess.from_paths(T, paths, labels)

    return make(rev, (0, -1), False), make(fwd, (0, 1), True)


def pre_perm_from_string(s: str) -> DPermutation:
    pg, pr = pre_processes(s)
    return DPermutation((pg.sigma_up("definition"), pr.sigma_down("definition")))


# ------------------------------------------------------------ sampling

#: cap on k in the rejection sampler: P((-k,1)) = 2^-(k+2) >= 2^-62
K_CAP = 60

#: default bound on the DP sampler's size
DP_MAX_N = 2000

#: below this size the DP uses exact integer counts
EXACT_MAX_N = 60


@lru_cache(maxsize=8)
def _exact_counts(n):
    """Backward counts N_t[x, y+1] of cone completions, exact integers."""
    X, Y = n + 2, n + 3
    layers = [None] * (2 * n + 1)
    cur = np.zeros((X, Y), dtype=object)
    cur[:, :] = 0
    cur[0, 1] = 1
    layers[2 * n] = cur
    for t in range(2 * n - 1, -1, -1):
        new = np.zeros((X, Y), dtype=object)
        new[:, :] = 0
        new[:-1, 1:] += cur[1:, :-1]
        new[:, :-1] += np.cumsum(cur[:, 1:], axis=0)
        layers[t] = new
        cur = new
    return layers


def count_schnyder_woods(n: int) -> int:
    """Number of Schnyder woods of size n (exact DP over cone walks)."""
    return int(_exact_counts(n)[0][0, 1])


def _sample_exact(n, rng):
    layers = _exact_counts(n)
    prng = random.Random(int(rng.integers(2 ** 63)))
    x, y = 0, 0
    steps = []
    for t in range(2 * n):
        nxt = layers[t + 1]
        r = prng.randrange(int(layers[t][x, y + 1]))
        if y >= 0:
            w = nxt[x + 1, y]
            if r < w:
                steps.append((1, -1))
                x, y = x + 1, y - 1
                continue
            r -= w
        k = 0
        while True:
            w = nxt[x - k, y + 2]
            if r < w:
                break
            r -= w
            k += 1
        steps.append((-k, 1))
        x, y = x - k, y + 1
    return ConeWalk(tuple(steps))


class ConeDP:
    """Backward probabilities of the cone excursion under the step law.

    P_t[x, y+1] is the probability that the walk with P((1,-1)) = 1/2 and
    P((-k,1)) = 2^-(k+2), started at (x, y) at time t, stays in the cone and
    sits at the origin at time 2n.  Working with probabilities rather than
    counts keeps typical states within binary64 range.  Only every
    ``block``-th layer is kept; the others are recomputed block by block
    during forward sampling.
    """

    def __init__(self, n, max_n=DP_MAX_N, block=None):
        if n > max_n:
            raise BudgetExceeded(f"DP sampler size {n} exceeds the budget {max_n}")
        self.n = n
        T = 2 * n
        if block is None:
            block = T if n <= 300 else max(8, int(np.sqrt(T)))
        self.block = block
        self.checkpoints = {}
        P = self._terminal()
        self.checkpoints[T] = P
        for t in range(T - 1, -1, -1):
            P, _ = self._back(P, t)
            if t % block == 0:
                self.checkpoints[t] = P
        self.p_excursion = float(P[0, 1])

    def _shape(self, t):
        n = self.n
        return min(n, (t + 1) // 2) + 1, min(t, 2 * n - t) + 2

    def _terminal(self):
        P = np.zeros(self._shape(2 * self.n))
        P[0, 1] = 1.0
        return P

    def _back(self, P, t):
        """P_t from P_{t+1}; also returns G_{t+1} (discounted sums over x)."""
        G = lfilter([0.25], [1.0, -0.5], P, axis=0)
        X, Y = self._shape(t)
        new = np.zeros((X, Y))
        px, py = P.shape
        # b step to (x+1, y-1): new[x, yi] += P[x+1, yi-1]
        xs, ys = min(X, px - 1), min(Y, py + 1)
        if xs > 0 and ys > 1:
            new[:xs, 1:ys] += 0.5 * P[1:xs + 1, :ys - 1]
        # g step to (x-k, y+1): new[x, yi] += G[x, yi+1]
        xs, ys = min(X, px), min(Y, py - 1)
        if xs > 0 and ys > 0:
            new[:xs, :ys] += G[:xs, 1:ys + 1]
        return new, G

    def block_layers(self, t0):
        """{t: (P_t, G_t)} for t in (t0, t0 + block], recomputed from a checkpoint."""
        T = 2 * self.n
        t1 = min(T, t0 + self.block)
        P = self.checkpoints[t1]
        out = {}
        for t in range(t1 - 1, t0 - 1, -1):
            newP, G = self._back(P, t)
            out[t + 1] = (P, G)
            P = newP
        return out

    def sample(self, size, rng):
        """``size`` cone walks, as an array of shape (size, 2n, 2)."""
        n, T = self.n, 2 * self.n
        if not self.p_excursion > 0:
            raise BudgetExceeded("excursion probability underflowed")
        x = np.zeros(size, dtype=np.int64)
        y = np.zeros(size, dtype=np.int64)
        steps = np.zeros((size, T, 2), dtype=np.int64)

        def at(A, xi, yi):
            ok = (xi >= 0) & (yi >= 0) & (xi < A.shape[0]) & (yi < A.shape[1])
            v = np.zeros(len(xi))
            v[ok] = A[xi[ok], yi[ok]]
            return v

        for t0 in range(0, T, self.block):
            layers = self.block_layers(t0)
            for t in range(t0, min(T, t0 + self.block)):
                P, G = layers[t + 1]
                wb = np.where(y >= 0, 0.5 * at(P, x + 1, y), 0.0)
                wg = at(G, x, y + 2)
                u = rng.random(size) * (wb + wg)
                isb = u < wb
                u = u - wb
                k = np.zeros(size, dtype=np.int64)
                active = ~isb
                scale = 0.25
                while active.any():
                    idx = np.nonzero(active)[0]
                    w = scale * at(P, x[idx] - k[idx], y[idx] + 2)
                    stop = (u[idx] < w) | (k[idx] >= x[idx])
                    u[idx[~stop]] -= w[~stop]
                    k[idx[~stop]] += 1
                    active[idx[stop]] = False
                    scale *= 0.5
                    if scale == 0.0:
                        scale = 5e-324
                steps[:, t, 0] = np.where(isb, 1, -k)
                steps[:, t, 1] = np.where(isb, -1, 1)
                x = x + steps[:, t, 0]
                y = y + steps[:, t, 1]
        return steps


@lru_cache(maxsize=2)
def _cone_dp(n):
    return ConeDP(n)


def _rejection_walks(n, size, rng, max_tries):
    out = []
    tries = 0
    batch = 4096
    while len(out) < size:
        if tries >= max_tries:
            raise RetryLimit(f"rejection sampler exceeded {max_tries} attempts")
        m = min(batch, max_tries - tries)
        tries += m
        isb = rng.random((m, 2 * n)) < 0.5
        k = rng.geometric(0.5, size=(m, 2 * n)) - 1
        while True:
            over = k > K_CAP
            if not over.any():
                break
            k[over] = rng.geometric(0.5, size=int(over.sum())) - 1
        dx = np.where(isb, 1, -k)
        dy = np.where(isb, -1, 1)
        X = np.cumsum(dx, axis=1)
        Y = np.cumsum(dy, axis=1)
        ok = (X.min(axis=1) >= 0) & (Y.min(axis=1) >= -1) & (X[:, -1] == 0) & (Y[:, -1] == 0)
        for i in np.nonzero(ok)[0]:
            out.append(np.stack([dx[i], dy[i]], axis=1))
            if len(out) == size:
                break
        batch = min(batch * 2, 1 << 16)
    return np.array(out, dtype=np.int64).reshape(size, 2 * n, 2)


def sample_cone_walks(n, size, seed, method="dp", exact=None, max_tries=10 ** 8):
    """``size`` independent uniform cone walks of size n, shape (size, 2n, 2)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = rng_for(seed)
    if method == "rejection":
        return _rejection_walks(n, size, rng, max_tries)
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    if exact is None:
        exact = n <= EXACT_MAX_N
    if exact:
        if n > EXACT_MAX_N:
            raise BudgetExceeded(f"exact DP limited to n <= {EXACT_MAX_N}")
        return np.array([_sample_exact(n, rng).steps for _ in range(size)],
                        dtype=np.int64).reshape(size, 2 * n, 2)
    return _cone_dp(n).sample(size, rng)


def sample_uniform_schnyder(n, seed, method="dp", exact=None) -> str:
    """A uniformly random Schnyder wood string of size n."""
    steps = sample_cone_walks(n, 1, seed, method, exact)[0]
    return walk_to_string(ConeWalk(tuple(map(tuple, steps))))


def sample_uniform_schnyder_batch(n, size, seed, method="dp", exact=None) -> list[str]:
    walks = sample_cone_walks(n, size, seed, method, exact)
    return [walk_to_string(ConeWalk(tuple(map(tuple, w)))) for w in walks]
