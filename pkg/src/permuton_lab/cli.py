"""
permuton-lab command line.

    permuton-lab sample schnyder --n 200 --seed 1 --out runs/wood
    permuton-lab sample brownian --n 10000 --p 0.5,0.5 --seed 1 --out runs/bsp
    permuton-lab freq --input runs/wood.json --pattern "2,1|1,2" --mode exact
    permuton-lab verify --out manifest.json
    permuton-lab convergence --family schnyder --ns 100,400,1600 --reps 20 --seed 1

Exit codes: 0 success, 2 invalid input or failed verification, 3 budget or
retry limit exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import formats, oracle, permuton, schnyder, separable
from .core import (BudgetExceeded, DPermutation, EnumerationLimit, InvalidPermutation, freq,
                   freq_sampled, occ, parse_pattern, pattern_table)

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3

_INVALID = (InvalidPermutation, schnyder.InvalidString, schnyder.InvalidWalk,
            separable.InvalidTree, separable.NotSeparable, ValueError, OSError,
            json.JSONDecodeError, KeyError)
_BUDGET = (BudgetExceeded, schnyder.RetryLimit, separable.RetryLimit, EnumerationLimit)


class VerificationFailed(Exception):
    pass


def _probs(text):
    if text is None:
        return None
    return tuple(float(x) for x in text.split(","))


def _ints(text):
    return [int(x) for x in text.split(",") if x]


def _prefix(out):
    p = Path(out)
    return p.with_suffix("") if p.suffix in (".json", ".csv") else p


def _with(prefix, ext):
    return prefix.parent / (prefix.name + ext)


# ----------------------------------------------------------------- sample

def cmd_sample(args):
    family = args.family
    meta = {"family": family, "n": args.n, "seed": args.seed}
    extra = {}
    if args.n < 1:
        raise ValueError("--n must be positive")
    if family == "schnyder":
        if args.p is not None:
            raise ValueError("--p does not apply to Schnyder woods")
        if args.d not in (None, 3):
            raise ValueError("Schnyder wood permutations have d = 3")
        method = args.method or "dp"
        s = schnyder.sample_uniform_schnyder(args.n, args.seed, method=method)
        sigma = schnyder.schnyder_perm_from_string(s)
        extra[".string"] = s + "\n"
        meta["method"] = method
    elif family == "separable":
        if args.p is not None:
            raise ValueError("--p does not apply to uniform separable permutations; "
                             "use the brownian family for sign probabilities")
        d = args.d or 3
        method = args.method or ("cycle" if args.n > 200 else "rejection")
        T = separable.sample_uniform_swap_tree(args.n, d, args.seed, method=method)
        sigma = separable.sign_tree_inverse(T)
        extra[".tree.json"] = formats.dump_json(T.to_json())
        meta.update(d=d, method=method)
    else:
        p = _probs(args.p) or (0.5,) * ((args.d or 3) - 1)
        if args.d is not None and args.d != len(p) + 1:
            raise ValueError(f"--d {args.d} needs {args.d - 1} probabilities in --p")
        sigma = separable.sample_brownian_cloud(args.n, p, args.seed)
        meta["p"] = list(p)
    prefix = _prefix(args.out)
    written = []
    if args.format in ("json", "both"):
        formats.write_perm(_with(prefix, ".json"), sigma)
        written.append(str(_with(prefix, ".json")))
    if args.format in ("csv", "both"):
        text = formats.point_cloud_csv(formats.normalized_points(sigma))
        formats.write_atomic(_with(prefix, ".csv"), text)
        written.append(str(_with(prefix, ".csv")))
    for ext, text in extra.items():
        formats.write_atomic(_with(prefix, ext), text)
        written.append(str(_with(prefix, ext)))
    print(json.dumps({**meta, "d": sigma.d, "files": written}))
    return EXIT_OK


# ------------------------------------------------------------------- freq

def _load_perm(path):
    path = Path(path)
    if path.suffix == ".csv":
        from .core import perm_of_points
        return perm_of_points(formats.read_point_cloud(path))
    return formats.read_perm(path)


def cmd_freq(args):
    sigma = _load_perm(args.input)
    if args.table:
        table = pattern_table(sigma, args.table)
        text = formats.pattern_table_csv(table, sigma.n)
        if args.out:
            formats.write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
        if not args.pattern:
            return EXIT_OK
    if not args.pattern:
        raise ValueError("--pattern is required unless --table is given")
    tau = parse_pattern(args.pattern)
    if tau.d != sigma.d:
        raise ValueError(f"pattern has d={tau.d} but the permutation has d={sigma.d}")
    if args.mode == "exact":
        m = occ(tau, sigma)
        f = freq(tau, sigma)
        report = {"pattern": args.pattern, "mode": "exact", "occ": m,
                  "freq": str(f), "value": float(f)}
    else:
        if args.seed is None:
            raise ValueError("--seed is required in mc mode")
        est, se = freq_sampled(tau, sigma, args.trials, args.seed)
        report = {"pattern": args.pattern, "mode": "mc", "trials": args.trials,
                  "seed": args.seed, "value": est, "se": se}
    print(json.dumps(report))
    return EXIT_OK


# ----------------------------------------------------------------- verify

def cmd_verify(args):
    max_n = dict(oracle.EnumerationBudget().max_n)
    for item in args.max_n or []:
        fam, _, val = item.partition("=")
        max_n[fam] = int(val)
    budget = oracle.EnumerationBudget(max_n=max_n, max_k=args.max_k, seconds=args.seconds)
    report = oracle.verify(budget)
    text = formats.dump_json({"budget": {"max_n": max_n, "max_k": args.max_k,
                                         "seconds": args.seconds},
                              "checks": report})
    if args.out:
        formats.write_atomic(args.out, text)
    for r in report:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}  ({r['seconds']:.2f}s)  {r['detail']}")
    if not all(r["passed"] for r in report):
        raise VerificationFailed(f"{sum(not r['passed'] for r in report)} checks failed")
    return EXIT_OK


# ------------------------------------------------------------ convergence

def _marginal(sigma, j):
    if j is None:
        return sigma
    return DPermutation(sigma.column(j))


def make_sampler(family, d=3, marginal=None, method=None):
    """A size -> random DPermutation sampler, deterministic in its seed."""
    if family == "schnyder":
        def sample(n, seed):
            s = schnyder.sample_uniform_schnyder(n, seed, method=method or "dp")
            return _marginal(schnyder.schnyder_perm_from_string(s), marginal)
    elif family == "separable":
        def sample(n, seed):
            m = method or ("cycle" if n > 200 else "rejection")
            return _marginal(separable.sample_uniform_separable(n, d, seed, method=m), marginal)
    else:
        raise ValueError(f"unknown family {family!r}")
    return sample


def cmd_convergence(args):
    if args.seed is None:
        raise ValueError("--seed is required")
    marginal = args.marginal
    if marginal is None and args.pattern is None:
        marginal = 1
    patterns = [parse_pattern(p) for p in (args.pattern or ["2,1"])]
    sampler = make_sampler(args.family, args.d or 3, marginal, args.method)
    t0 = time.perf_counter()
    rep = permuton.convergence_report(sampler, patterns, _ints(args.ns), args.reps, args.seed,
                                      trials=args.trials, law_k=tuple(_ints(args.law_k or "")),
                                      law_samples=args.law_samples)
    obj = rep.to_json()
    obj["config"] = {"family": args.family, "d": args.d or 3, "marginal": marginal,
                     "ns": _ints(args.ns), "reps": args.reps, "seed": args.seed,
                     "trials": args.trials, "seconds": round(time.perf_counter() - t0, 3)}
    text = formats.dump_json(obj)
    if args.out:
        formats.write_atomic(args.out, text)
    for p, rows in rep.rows.items():
        for r in rows:
            print(f"{p}  n={r['n']}  mean={r['mean']:.5f}  se={r['se']:.5f}  reps={r['reps']}")
        print(f"{p}  trend: {rep.trends[p]}")
    return EXIT_OK


# ------------------------------------------------------------------- main

def build_parser():
    ap = argparse.ArgumentParser(prog="permuton-lab", description="d-permutations and permutons")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample a random d-permutation and export it")
    s.add_argument("family", choices=["schnyder", "separable", "brownian"])
    s.add_argument("--n", type=int, required=True, help="size (number of points)")
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--p", default=None, help="sign probabilities p1,p2,... (brownian)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="output prefix; .json and .csv are appended")
    s.add_argument("--format", choices=["json", "csv", "both"], default="both")
    s.add_argument("--method", default=None,
                   help="schnyder: dp|rejection; separable: rejection|cycle")
    s.set_defaults(func=cmd_sample)

    f = sub.add_parser("freq", help="pattern frequency in a stored permutation")
    f.add_argument("--input", required=True, help="permutation JSON (or point-cloud CSV)")
    f.add_argument("--pattern", default=None, help='e.g. "1,3,2|2,1,3"')
    f.add_argument("--mode", choices=["exact", "mc"], default="exact")
    f.add_argument("--trials", type=int, default=100000)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--table", type=int, default=None, help="write the size-k pattern table")
    f.add_argument("--out", default=None, help="CSV path for --table")
    f.set_defaults(func=cmd_freq)

    v = sub.add_parser("verify", help="run every oracle cross-check")
    v.add_argument("--out", default=None, help="JSON manifest path")
    v.add_argument("--max-n", action="append", metavar="FAMILY=N",
                   help="enumeration cap per family (perm, schnyder, separable)")
    v.add_argument("--max-k", type=int, default=3)
    v.add_argument("--seconds", type=float, default=600.0)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convergence", help="pattern-frequency diagnostics across sizes")
    c.add_argument("--family", choices=["schnyder", "separable"], required=True)
    c.add_argument("--ns", default="100,400,1600")
    c.add_argument("--reps", type=int, default=20)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--d", type=int, default=None)
    c.add_argument("--pattern", action="append", default=None)
    c.add_argument("--marginal", type=int, default=None,
                   help="project onto coordinate j before counting (default 1 without --pattern)")
    c.add_argument("--trials", type=int, default=None,
                   help="Monte Carlo subsets per replicate (default: exact counts)")
    c.add_argument("--law-k", default=None, help="pattern sizes whose empirical law is tabulated")
    c.add_argument("--law-samples", type=int, default=2000)
    c.add_argument("--method", default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_convergence)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _BUDGET as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
