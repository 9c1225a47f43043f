"""
How fast does the pattern of k random points approach the permuton?

    python3 demos/permuton_approximation.py
"""
import numpy as np

from permuton_lab.core import DPermutation
from permuton_lab.permuton import EmpiricalPermuton, approximation_curve, loglog_slope

rng = np.random.default_rng(3)
sigma = DPermutation.from_array(rng.permutation(32)[None])
mu = EmpiricalPermuton(sigma)

ks = [32, 128, 512, 2048]
rows = approximation_curve(mu, ks, reps=7, seed=4)
print("   k   median lower   median upper   worst-case bound")
for r in rows:
    print(f"{r.k:5d}   {r.median:12.4f}   {r.median_upper:12.4f}   {r.bound:16.4f}")
print(f"log-log slope of the medians: {loglog_slope(ks, [r.median for r in rows]):.3f}")
