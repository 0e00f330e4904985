"""The four-point pattern x, x+nm, x+nk, x+nm+nk.

A linear character in any slot kills the pattern average. Local U^2 norms
along n.Q separate a quadratic phase from random signs. Finally the Mobius
function barely correlates with the pattern, while its square (a
nonnegative function) clearly does.
"""

import numpy as np

from gowerslab import (
    FunctionTable,
    GroupSpec,
    local_norm_chain,
    mobius_experiment,
    multiplicity_profile,
    pattern_average,
)

N, M = 257, 12
g = GroupSpec.cyclic(N)
one = FunctionTable.constant(g)
chi = FunctionTable.character(g, 5)
print(f"A_(N={N}, M={M})")
print(f"  (1, 1, 1, 1)         {pattern_average(one, one, one, one, M).value.real:.6f}")
print(f"  (1, 1, 1, chi)       {abs(pattern_average(one, one, one, chi, M).value):.2e}")
print(f"  (chi, 1, 1, 1)       {abs(pattern_average(chi, one, one, one, M).value):.2e}")

N, M, kappa = 1009, 31, 0.5
gq = GroupSpec.cyclic(N)
for name, f in (
    ("quadratic phase", FunctionTable.quadratic_phase(N, 1)),
    ("random +-1", FunctionTable.random_pm1(gq, np.random.default_rng(0))),
):
    chain = local_norm_chain(f, M, kappa)
    print(f"average local U^2 along n.Q, {name:16s} {chain.average:.4f}")

prof = multiplicity_profile(N, 1, 32, kappa)
print(
    f"\nmultiplicity of Q + 32 Q in Z/{N}: total {prof.total}, max {prof.max_multiplicity}, E nu^2 = {prof.mean_nu_squared:.4f}"
)
print(
    f"  spectrum of nu2 is nonnegative: {bool(np.all(prof.spectrum.coefficients.real > -1e-9))}, l1 mass {prof.l1_spectrum:.4f}"
)

ex = mobius_experiment(1000, method="exact")
sq = mobius_experiment(1000, method="exact", square=True)
mc = mobius_experiment(10**5, samples=10**6, seed=1, method="monte_carlo")
print("\nMobius pattern average")
print(f"  N=1000 exact   mu: {ex.numerator}/{ex.denominator} = {ex.value.real:.6f}   mu^2: {sq.value.real:.4f}")
print(f"  N=1e5  MC      mu: {mc.value.real:.5f} +- {mc.std_error:.5f}")
