"""Uniformity norms along progressions: global versus local structure.

A quadratic phase e(x^2/N) is as far from uniform as possible for U^3 but
looks uniform to U^2 over the whole group. Along a short progression the
picture changes: locally a quadratic phase is close to linear, so the local
U^2 norm is large. Run with ``python demos/01_uniformity_norms.py``.
"""

import numpy as np

from gowerslab import (
    CosetProgression,
    FunctionTable,
    GroupSpec,
    SubgroupSpec,
    box_norm_exact,
    box_norm_mc,
    dft,
    uniformity_norm,
)

N = 257
g = GroupSpec.cyclic(N)
whole = SubgroupSpec.whole(g)
quad = FunctionTable.quadratic_phase(N, 1)
noise = FunctionTable.random_pm1(g, np.random.default_rng(0))

print(f"Z/{N}, global norms")
for name, f in (("quadratic phase", quad), ("random +-1", noise)):
    u2 = uniformity_norm(f, whole, 2).value
    u3 = uniformity_norm(f, whole, 3).value
    print(f"  {name:16s} U^2 = {u2:.4f}   U^3 = {u3:.4f}")

# U^2 has a closed form through the Fourier transform; the two routes agree
fourier = (np.abs(dft(noise).coefficients) ** 4).sum() ** 0.25
print(f"  Fourier check for the random function: {fourier:.12f}")

print("\nlocal U^2 along {a : |a| <= L}")
for L in (2, 4, 8, 16, 64):
    q = CosetProgression.arithmetic(g, 1, L)
    print(
        f"  L = {L:3d}   quadratic {uniformity_norm(quad, q, 2).value:.4f}   random {uniformity_norm(noise, q, 2).value:.4f}"
    )

# Box norms mix directions. On a product group, a function of one
# coordinate is invisible to differencing in the other coordinate.
G = GroupSpec((16, 16))
rows = CosetProgression.from_subgroup(SubgroupSpec(G, [(1, 0)]))
cols = CosetProgression.from_subgroup(SubgroupSpec(G, [(0, 1)]))
rng = np.random.default_rng(1)
col_profile = rng.choice([-1.0, 1.0], 16)
f = FunctionTable(G, np.tile(col_profile, 16))  # depends on the second coordinate only
print("\nbox norms on (Z/16)^2 of a function of the second coordinate")
print(f"  rows x rows  {box_norm_exact(f, [rows, rows]).value:.4f}")
print(f"  cols x cols  {box_norm_exact(f, [cols, cols]).value:.4f}")
print(f"  rows x cols  {box_norm_exact(f, [rows, cols]).value:.4f}")

# Monte-Carlo: the widest direction is averaged exactly, the rest sampled
q = CosetProgression.arithmetic(g, 3, 20)
exact = uniformity_norm(noise, q, 3)
mc = box_norm_mc(noise, [q, q, q], samples=4000, seed=7)
print(f"\nU^3 along 3.[-20,20]: exact {exact.base_power_mean:.6f}, MC {mc.base_power_mean:.6f} +- {mc.std_error:.6f}")
