"""Scanning both sides of the qualitative Bessel inequality.

For a family of progressions Q_i the left side averages U^{2d-1} norms over
all pairwise sums eps Q_i + eps Q_j; the right side averages U^d norms over
the Q_i. There is no explicit rate to test, so the output is the curve.
The second half builds f = f1 + f2 where each piece is invariant in one
direction and random in the other, the standard obstruction to a version
with min-norm control.
"""

import numpy as np

from gowerslab import FunctionTable, GroupSpec, SubgroupSpec, bessel_scan, counterexample_pair
from gowerslab.bessel import counterexample_report, random_rank1_family
from gowerslab.bessel import to_tsv as bessel_to_tsv

g = GroupSpec.cyclic(256)
rng = np.random.default_rng(0)
family = random_rank1_family(g, 4, 12, seed=1)
for name, f in (("random +-1", FunctionTable.random_pm1(g, rng)), ("constant", FunctionTable.constant(g))):
    reports = bessel_scan(f, family, 2, [0.25, 0.5, 1.0], norm_budget=1e8, samples=4000, seed=2)
    print(f"{name}:")
    print("  " + bessel_to_tsv(reports).replace("\n", "\n  ").rstrip())
    for r in reports:
        for note in r.notes:
            print(f"  eps={r.eps}: {note}")

G = GroupSpec((32, 32))
rows, cols = SubgroupSpec(G, [(1, 0)]), SubgroupSpec(G, [(0, 1)])
pair = counterexample_pair(G, rows, cols, seed=3)
rep = counterexample_report(pair, rows, cols, 2, 2, samples=4000, seed=4)
print("\nf = f1 + f2 on (Z/32)^2")
for key in sorted(rep):
    print(f"  {key:18s} {rep[key]}")
