"""The four-point polynomial pattern average and the local-to-global machinery around it.

    A_{N,M}(f1, f2, f3, f4) = E_{x in Z/N} E_{n,m,k in [M]} f1(x) f2(x+nm) f3(x+nk) f4(x+nm+nk)

with [M] = {1, ..., M}. Integer-valued inputs are summed exactly in int64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from .errors import ArgumentError, ResourceError, StructuralError
from .funcspace import FunctionTable, Spectrum, dft, mobius_values
from .gowers import DEFAULT_BUDGET, box_norm
from .group import GroupSpec
from .progression import CosetProgression, convolve_counts

PATTERN_BUDGET = 10**8


@dataclass
class PatternAverage:
    N: int
    M: int
    value: complex
    method: str
    samples: int = 0
    std_error: float = 0.0
    numerator: int | None = None
    denominator: int | None = None

    def to_json(self) -> dict:
        out = {
            "N": self.N,
            "M": self.M,
            "value": [self.value.real, self.value.imag],
            "abs": abs(self.value),
            "method": self.method,
            "samples": self.samples,
            "std_error": self.std_error,
        }
        if self.numerator is not None:
            out["numerator"] = self.numerator
            out["denominator"] = self.denominator
        return out


def _integer_valued(vals: np.ndarray) -> bool:
    return (
        not np.any(vals.imag) and np.all(vals.real == np.round(vals.real)) and np.abs(vals.real).max(initial=0) < 2**20
    )


def _pattern_exact(vs, N, M, threads, x=None):
    """Sum over x (default all of Z/N) and n, m, k in [M] of the four-fold product."""
    v1, v2, v3, v4 = vs
    x = np.arange(N) if x is None else x
    v1 = v1[x]
    ks = np.arange(1, M + 1)

    def per_n(n):
        sm = (x[None, :] + n * ks[:, None]) % N  # (M, N): x + n m
        F2 = v2[sm]
        F3 = v3[sm]  # same index set with k in place of m
        # f4(x + nm + nk) as (m, k, x)
        F4 = v4[(sm[:, None, :] + n * ks[None, :, None]) % N]
        inner = np.einsum("kx,mkx->mx", F3, F4)
        return np.sum(v1 * np.sum(F2 * inner, axis=0))

    parts = _rng.map_ordered(per_n, range(1, M + 1), threads)
    total = parts[0] * 0
    for p in parts:
        total = total + p
    return total


def pattern_average(
    f1: FunctionTable,
    f2: FunctionTable,
    f3: FunctionTable,
    f4: FunctionTable,
    M: int,
    method: str = "exact",
    samples: int = 100_000,
    seed: int | None = None,
    budget: float = PATTERN_BUDGET,
    threads: int = 1,
) -> PatternAverage:
    fs = (f1, f2, f3, f4)
    g = f1.group
    if g.rank != 1 or any(f.group != g for f in fs):
        raise StructuralError("pattern averages need four functions on the same cyclic group")
    if M < 1:
        raise ArgumentError("M must be >= 1")
    N = g.order
    cost = float(N) * M**3
    if method == "auto":
        method = "exact" if cost <= budget else "monte_carlo"
    if method == "exact":
        if cost > budget:
            raise ResourceError(
                f"exact pattern average needs {cost:.3g} evaluations, budget {budget:.3g}; use monte_carlo",
                cost=cost,
                budget=budget,
            )
        vals = [f.values for f in fs]
        denom = N * M**3
        if all(_integer_valued(v) for v in vals):
            total = int(_pattern_exact([v.real.astype(np.int64) for v in vals], N, M, threads))
            return PatternAverage(N, M, complex(total / denom), "exact", numerator=total, denominator=denom)
        total = complex(_pattern_exact(vals, N, M, threads))
        return PatternAverage(N, M, total / denom, "exact")
    if method == "monte_carlo":
        if seed is None:
            raise ArgumentError("Monte-Carlo pattern averages need a seed")
        vals = [f.values for f in fs]

        def block(item):
            b, size = item
            rng = _rng.block_rng(seed, b)
            x = rng.integers(0, N, _rng.BLOCK)[:size]
            n, m, k = (rng.integers(1, M + 1, _rng.BLOCK)[:size] for _ in range(3))
            return vals[0][x] * vals[1][(x + n * m) % N] * vals[2][(x + n * k) % N] * vals[3][(x + n * m + n * k) % N]

        draws = np.concatenate(_rng.map_ordered(block, list(_rng.blocks(samples)), threads))
        return _mc_result(N, M, draws, samples)
    raise ArgumentError(f"unknown method {method!r}")


def _mc_result(N, M, draws, samples) -> PatternAverage:
    est = complex(draws.mean())
    if samples > 1:
        var = draws.real.var(ddof=1) + draws.imag.var(ddof=1)
        se = math.sqrt(var / samples)
    else:
        se = 0.0
    return PatternAverage(N, M, est, "monte_carlo", samples, se)


# ---------------------------------------------------------------------------


def local_progression(group: GroupSpec, n: int, kappa: float) -> CosetProgression:
    """``n . Q`` with ``Q = {a : |a| <= kappa sqrt(N)}``, as a rank-one progression."""
    return CosetProgression.arithmetic(group, group.element_of(n % group.order), kappa * math.sqrt(group.order))


@dataclass
class LocalNormChain:
    rows: list  # dicts with n, value, method, std_error
    average: float | None  # None for an empty n_list

    def to_json(self):
        return {"rows": self.rows, "average": self.average}

    def to_tsv(self) -> str:
        return "n\tnorm\n" + "".join(f"{r['n']}\t{r['value']!r}\n" for r in self.rows)


def local_norm_chain(
    f: FunctionTable,
    M: int,
    kappa: float,
    n_list=None,
    d: int = 2,
    budget: float = DEFAULT_BUDGET,
    samples: int | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> LocalNormChain:
    """``||f||_{U^d_{n.Q}}`` for each n (default n in [M]) and their average."""
    g = f.group
    if g.rank != 1:
        raise StructuralError("local norm chains are defined on Z/N")
    if kappa * math.sqrt(g.order) < 1:
        raise ArgumentError("kappa * sqrt(N) must be >= 1")
    ns = list(range(1, M + 1)) if n_list is None else [int(n) for n in n_list]

    def one(n):
        q = local_progression(g, n, kappa)
        s = None if seed is None else seed + n
        r = box_norm(f, [q] * d, budget=budget, samples=samples, seed=s)
        return {"n": n, "value": r.value, "method": r.method, "std_error": r.std_error}

    rows = _rng.map_ordered(one, ns, threads)
    average = float(np.mean([r["value"] for r in rows])) if rows else None
    return LocalNormChain(rows, average)


@dataclass
class MultiplicityProfile:
    N: int
    nu: FunctionTable
    nu2: FunctionTable
    spectrum: Spectrum
    l1_spectrum: float
    mean_nu_squared: float
    total: int
    max_multiplicity: int

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "total": self.total,
            "max_multiplicity": self.max_multiplicity,
            "mean_nu_squared": self.mean_nu_squared,
            "l1_spectrum": self.l1_spectrum,
            "nu2_at_zero": float(self.nu2.values[0].real),
        }

    def to_tsv(self) -> str:
        rows = ["a\tnu\tnu2\tc_xi"]
        for a in range(self.N):
            rows.append(
                f"{a}\t{int(self.nu.values[a].real)}\t{self.nu2.values[a].real!r}\t{self.spectrum.coefficients[a].real!r}"
            )
        return "\n".join(rows) + "\n"


def multiplicity_profile(N: int, n: int, m: int, kappa: float) -> MultiplicityProfile:
    """nu = multiplicity of n.Q + m.Q and nu2(a) = E_b nu(b) nu(a - b)."""
    g = GroupSpec.cyclic(N)
    b = kappa * math.sqrt(N)
    q = CosetProgression(
        CosetProgression.arithmetic(g, 0, 0).subgroup,
        [g.element_of(n % N), g.element_of(m % N)],
        [b, b],
    )
    counts = q.histogram()
    conv = convolve_counts(g, counts, counts)
    nu = FunctionTable(g, counts.astype(float))
    nu2 = FunctionTable(g, conv / N)
    spec = dft(nu2)
    return MultiplicityProfile(
        N,
        nu,
        nu2,
        spec,
        spec.l1(),
        float(np.mean(counts.astype(float) ** 2)),
        int(counts.sum()),
        int(counts.max()),
    )


# ---------------------------------------------------------------------------


def mobius_experiment(
    N: int,
    M: int | None = None,
    embed_factor: int = 5,
    samples: int | None = None,
    seed: int | None = None,
    method: str = "auto",
    square: bool = False,
    budget: float = PATTERN_BUDGET,
    threads: int = 1,
) -> PatternAverage:
    """``E_{x in [N]} E_{n,m,k in [M]} mu(x) mu(x+nm) mu(x+nk) mu(x+nm+nk)``, M = floor(sqrt N) by default.

    Computed on Z/(embed_factor N) with the x-variable restricted to [N] and mu
    taken at the true integers x + nm etc. (all below embed_factor N, so no
    wraparound). The returned value is normalised by |[N]|, not by the
    group order. ``square`` replaces mu by mu^2.
    """
    if N < 1:
        raise ArgumentError("N must be >= 1")
    M = math.isqrt(N) if M is None else int(M)
    top = N + 2 * M * M
    size = embed_factor * N
    if top >= size:
        raise ArgumentError(f"embedding Z/{size} too small: arguments reach {top}")
    mu = mobius_values(top).astype(np.int64)
    if square:
        mu = mu * mu
    cost = float(N) * M**3
    if method == "auto":
        method = "exact" if cost <= budget else "monte_carlo"
    if method == "exact":
        if cost > budget:
            raise ResourceError(f"exact Mobius average needs {cost:.3g} evaluations", cost=cost, budget=budget)
        full = np.zeros(size, dtype=np.int64)
        full[1 : top + 1] = mu[1:]
        num = int(_pattern_exact([full] * 4, size, M, threads, x=np.arange(1, N + 1)))
        denom = N * M**3
        return PatternAverage(N, M, complex(num / denom), "exact", numerator=num, denominator=denom)
    if method == "monte_carlo":
        if seed is None or samples is None:
            raise ArgumentError("Monte-Carlo Mobius averages need samples and a seed")

        def block(item):
            b, sz = item
            rng = _rng.block_rng(seed, b)
            x = rng.integers(1, N + 1, _rng.BLOCK)[:sz]
            n, m, k = (rng.integers(1, M + 1, _rng.BLOCK)[:sz] for _ in range(3))
            return (mu[x] * mu[x + n * m] * mu[x + n * k] * mu[x + n * m + n * k]).astype(float)

        draws = np.concatenate(_rng.map_ordered(block, list(_rng.blocks(samples)), threads))
        return _mc_result(N, M, draws, samples)
    raise ArgumentError(f"unknown method {method!r}")
