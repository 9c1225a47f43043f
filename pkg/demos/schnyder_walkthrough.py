"""
From a Schnyder wood string to its 3-permutation and back to the trees.

    python3 demos/schnyder_walkthrough.py
"""
from permuton_lab.core import format_pattern, freq, inverse_marginal, DPermutation
from permuton_lab.schnyder import (build_process, sample_uniform_schnyder, string_to_walk,
                                   trees_from_processes, walk_to_string)

s = "gbggbgrgbrrgbbbgbrrggbrrrgbbrr"
w = string_to_walk(s)
print("string      ", s)
print("walk steps  ", w.steps[:6], "...", len(w.steps), "steps")
assert walk_to_string(w) == s

# one coalescent process per colour; their orders give the two columns
Zg, Zr = build_process(w, "green"), build_process(w, "red")
sigma = DPermutation((Zg.sigma_up(), Zr.sigma_down()))
print("sigma       ", format_pattern(sigma))
print("green^-1    ", inverse_marginal(sigma, 1))
print("red^-1      ", inverse_marginal(sigma, 2))

green, red = trees_from_processes(Zg, Zr)
print("green root children", green.children(0))
print("red children of 10 ", red.children(10))

# a larger uniform wood: the green marginal has about two thirds inversions
big = sample_uniform_schnyder(400, seed=1)
Zg = build_process(string_to_walk(big), "green")
col = DPermutation(Zg.sigma_up())
print(f"n=400 green inversion frequency {float(freq(DPermutation((2, 1)), col)):.4f}")
