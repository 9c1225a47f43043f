"""
File formats.  Every writer goes through a temporary file in the target
directory followed by a rename, so readers never see a partial file.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import DPermutation, InvalidPermutation, format_pattern, validate


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj, indent=1) -> str:
    return json.dumps(obj, indent=indent, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, DPermutation):
        return format_pattern(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


# ----------------------------------------------------------- permutations

def perm_to_json(sigma: DPermutation) -> dict:
    return {"d": sigma.d, "n": sigma.n, "cols": [list(c) for c in sigma.cols]}


def perm_from_json(obj) -> DPermutation:
    try:
        d, n, cols = int(obj["d"]), int(obj["n"]), obj["cols"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidPermutation([f"malformed permutation object: {exc}"]) from None
    errors = validate(cols)
    if len(cols) != d - 1:
        errors.append(f"expected {d - 1} columns, found {len(cols)}")
    if any(len(c) != n for c in cols):
        errors.append(f"columns must have length {n}")
    if errors:
        raise InvalidPermutation(errors)
    return DPermutation(cols)


def read_perm(path) -> DPermutation:
    with open(path) as f:
        return perm_from_json(json.load(f))


def write_perm(path, sigma: DPermutation):
    write_atomic(path, dump_json(perm_to_json(sigma), indent=None))


# ----------------------------------------------------- tables and clouds

def pattern_table_csv(table: dict, n: int) -> str:
    """CSV "tau,occ,freq" from a pattern -> occ table of a size-n permutation."""
    from math import comb
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "occ", "freq"])
    for tau, m in table.items():
        w.writerow([format_pattern(tau), m, repr(m / comb(n, tau.n))])
    return buf.getvalue()


def normalized_points(sigma: DPermutation) -> np.ndarray:
    """Cube centres ((2i-1)/(2n), (2 sigma(i)-1)/(2n), ...), shape (n, d)."""
    return (2 * sigma.points() - 1) / (2 * sigma.n)


def point_cloud_csv(points) -> str:
    points = np.asarray(points, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i"] + [f"x{j + 1}" for j in range(points.shape[1])])
    for i, row in enumerate(points, 1):
        w.writerow([i] + [repr(float(v)) for v in row])
    return buf.getvalue()


def read_point_cloud(path) -> np.ndarray:
    with open(path) as f:
        rows = list(csv.reader(f))
    return np.array([[float(v) for v in r[1:]] for r in rows[1:]])


# ------------------------------------------------------------- Schnyder

def walk_to_json(w) -> dict:
    return {"n": w.n, "steps": [list(s) for s in w.steps]}


def walk_from_json(obj):
    from .schnyder import ConeWalk, InvalidWalk
    w = ConeWalk(tuple(tuple(s) for s in obj["steps"]))
    if "n" in obj and int(obj["n"]) != w.n:
        raise InvalidWalk(f"declared n={obj['n']} but {len(w.steps)} steps")
    errors = w.validate()
    if errors:
        raise InvalidWalk(errors[0])
    return w


def read_string(path) -> str:
    from .schnyder import check_string
    with open(path) as f:
        return check_string(f.read().strip())


def write_string(path, s: str):
    write_atomic(path, s + "\n")
