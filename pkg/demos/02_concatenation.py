"""Concatenation of polynomial structure.

If P has degree <d1 along H1 and degree <d2 along H2, then P has degree
<d1+d2-1 along H1+H2, and the monomial n^(d1-1) m^(d2-1) shows this cannot
be improved. The checks below are exhaustive over (Z/5)^2 and every failure
comes with a witness that can be re-evaluated by hand.
"""

import numpy as np

from gowerslab import concat_property_test, degree_check, rank_check
from gowerslab.polyrank import examples_lowrank, iterated_difference, monomial

P, h1, h2 = monomial(5, 2, 2)  # P(n, m) = n m
print("P(n, m) = n m over Z/5")
print(f"  degree <2 along rows:      {degree_check(P, h1, 2).verdict}")
print(f"  degree <2 along columns:   {degree_check(P, h2, 2).verdict}")
print(f"  degree <3 along the plane: {degree_check(P, h1 + h2, 3).verdict}")
cert = degree_check(P, h1 + h2, 2)
shifts, x = cert.witness
value = iterated_difference(P, shifts).values[x.index]
print(
    f"  degree <2 along the plane: {cert.verdict}  (difference along {[h.residues for h in shifts]} at {x.residues} is {value})"
)

print("\nrandom instances satisfying the hypotheses")
for d1, d2 in ((1, 1), (2, 2), (2, 3), (3, 2)):
    rep = concat_property_test({"kind": "polynomial", "p": 5, "d1": d1, "d2": d2}, 40, seed=d1 * 10 + d2)
    print(f"  d1={d1} d2={d2}: {rep['trials']} trials, {rep['violations']} violations")

print("\nlow-rank families")
rng = np.random.default_rng(3)
(P2, hs2), (P3, hs3) = examples_lowrank(5, rng)
print(f"  f(n) + g(m)                    rank <(rows, cols):   {rank_check(P2, hs2).verdict}")
print(f"  f(n,m) + g(n,k) + h(m,k)       rank <(e1, e2, e3):   {rank_check(P3, hs3).verdict}")
print(f"  n m                            rank <(rows, cols):   {rank_check(P, [h1, h2]).verdict}")
rep = concat_property_test({"kind": "rank", "p": 3, "d1": 2, "d2": 2}, 10, seed=0)
print(f"  product-rank concatenation, 10 trials over (Z/3)^4: {rep['violations']} violations")
