"""Gowers box and uniformity norms, Gowers inner products and dual functions.

Exact evaluation runs the Delta-recursion

    value_d(f) = E_{h, h' in Q_d} value_{d-1}(Delta_{h,h'} f),   value_0 = mean,

using shift invariance of the inner quantity to collapse the pair (h, h') to
its difference: Delta_{h,h'} f = T^h (f * conj(T^{h'-h} f)). Each level then
averages over the difference multiset Q_d - Q_d, and the innermost level is a
weighted autocorrelation that is evaluated for all differences at once by FFT.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _rng
from .errors import ArgumentError, ResourceError, StructuralError
from .funcspace import FunctionTable, autocorrelation_values
from .group import GroupSpec
from .progression import as_shift_set, difference_counts

DEFAULT_BUDGET = 10**9
_CHUNK = 2**20  # complex entries per vectorised batch


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    samples: int
    std_error: float
    base_power_mean: float
    d: int

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("d")
        return out


def _result(raw: float, d: int, method: str, samples=0, std_error=0.0) -> NormResult:
    value = max(raw, 0.0) ** (1.0 / 2**d)
    return NormResult(float(value), method, int(samples), float(std_error), float(raw), d)


# ---------------------------------------------------------------------------
# difference-multiset levels


@dataclass
class _Level:
    support: np.ndarray  # flat indices delta with nonzero weight
    weights: np.ndarray  # probability of h' - h = delta
    perm: np.ndarray | None = None  # perm[j, x] = index of x - support[j]

    @property
    def size(self):
        return len(self.support)


def _level(group: GroupSpec, q) -> _Level:
    q = as_shift_set(group, q)
    counts = difference_counts(group, q.histogram())
    supp = np.flatnonzero(counts)
    total = float(q.total) ** 2
    return _Level(supp, counts[supp] / total)


def _shift_perm(group: GroupSpec, deltas: np.ndarray) -> np.ndarray:
    x = np.arange(group.order, dtype=np.int64)
    return group.sub_idx(x[None, :], np.asarray(deltas)[:, None])


def _levels(group: GroupSpec, qs) -> list[_Level]:
    return [_level(group, q) for q in qs]


def _exact_cost(group: GroupSpec, levels: list[_Level], base: str) -> float:
    n = group.order
    inner = n * max(1.0, math.log2(n)) if base == "fft" else n * levels[-1].size
    cost = inner
    for lv in levels[:-1]:
        cost *= lv.size
    return float(cost)


class _PowerMean:
    """Evaluate the 2^d-th power of a box norm for batches of value arrays.

    ``levels`` are ordered outermost first; the last one is evaluated by FFT.
    """

    def __init__(self, group: GroupSpec, levels: list[_Level], base: str = "fft"):
        self.group = group
        self.levels = levels
        self.base = base

    def __call__(self, vals: np.ndarray, threads: int = 1) -> np.ndarray:
        vals = np.atleast_2d(np.asarray(vals, dtype=complex))
        if not self.levels:
            return vals.mean(axis=-1)
        return self._rec(vals, 0, threads)

    def _perm(self, lv: _Level):
        if lv.perm is None:
            lv.perm = _shift_perm(self.group, lv.support)
        return lv.perm

    def _rec(self, vals: np.ndarray, k: int, threads: int = 1) -> np.ndarray:
        lv = self.levels[k]
        last = k == len(self.levels) - 1
        if last and self.base == "fft":
            ac = autocorrelation_values(self.group, vals)
            return ac[:, lv.support] @ lv.weights
        b, n = vals.shape
        step = max(1, _CHUNK // max(1, b * n))
        chunks = [slice(s, min(s + step, lv.size)) for s in range(0, lv.size, step)]
        perm = self._perm(lv)

        def run(sl):
            shifted = vals[:, perm[sl]]  # (b, c, n)
            prod = vals[:, None, :] * shifted.conj()
            if last:
                sub = prod.mean(axis=-1)
            else:
                sub = self._rec(prod.reshape(-1, n), k + 1).reshape(b, -1)
            return sub @ lv.weights[sl]

        parts = _rng.map_ordered(run, chunks, threads)
        out = np.zeros(b, dtype=complex)
        for p in parts:
            out = out + p
        return out


def _prepare(f: FunctionTable, qs, d, reorder=True, base="fft"):
    if d is None:
        d = len(qs)
    if d < 1:
        raise ArgumentError("norm order d must be >= 1")
    if len(qs) != d:
        raise ArgumentError(f"need d={d} averaging multisets, got {len(qs)}")
    levels = _levels(f.group, qs)
    if reorder and base == "fft":
        # the widest level goes innermost, where the FFT handles it in one pass
        levels = sorted(levels, key=lambda lv: lv.size)
    return d, levels


def box_norm_exact(
    f: FunctionTable, qs, d=None, budget=DEFAULT_BUDGET, threads=1, base="fft", reorder=True
) -> NormResult:
    """Exact ``||f||_{box^d_{Q_1..Q_d}}`` over multisets/progressions/subgroups ``qs``."""
    d, levels = _prepare(f, qs, d, reorder, base)
    cost = _exact_cost(f.group, levels, base)
    if budget is not None and cost > budget:
        raise ResourceError(
            f"exact box norm needs ~{cost:.3g} operations, budget is {budget:.3g}; use Monte-Carlo",
            cost=cost,
            budget=budget,
        )
    raw = _PowerMean(f.group, levels, base)(f.values[None, :], threads)[0]
    return _result(float(raw.real), d, "exact")


def uniformity_norm(f: FunctionTable, q, d: int, **kw) -> NormResult:
    """``||f||_{U^d_Q}``, the box norm with every direction equal to ``q``."""
    if d < 1:
        raise ArgumentError("norm order d must be >= 1")
    return box_norm_exact(f, [q] * d, d, **kw)


def power_mean_fn(group: GroupSpec, qs, base="fft"):
    """Vectorised ``values -> ||.||^{2^d}`` for a fixed tuple of directions."""
    levels = sorted(_levels(group, qs), key=lambda lv: lv.size)
    return _PowerMean(group, levels, base)


# ---------------------------------------------------------------------------
# Monte-Carlo


def box_norm_mc(f: FunctionTable, qs, d=None, samples=10_000, seed=0, threads=1) -> NormResult:
    """Unbiased estimate of the 2^d-th power, deterministic in ``seed``.

    Each draw samples (h, h') for every direction except the widest one and
    contributes the exact remaining average: the widest level is summed over
    its whole difference multiset through one FFT autocorrelation.
    """
    if d is None:
        d = len(qs)
    if d < 1 or len(qs) != d:
        raise ArgumentError(f"need d >= 1 and d={d} averaging multisets, got {len(qs)}")
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    g = f.group
    spaces = [as_shift_set(g, q) for q in qs]
    for s in spaces:
        if s.total < 1:
            raise ArgumentError("empty index space")
    inner = max(range(d), key=lambda i: (len(np.flatnonzero(difference_counts(g, spaces[i].histogram()))), -i))
    last = _level(g, spaces[inner])
    outer = [s for i, s in enumerate(spaces) if i != inner]
    x = np.arange(g.order, dtype=np.int64)
    vals = f.values

    def block(item):
        b, size = item
        rng = _rng.block_rng(seed, b)
        deltas = []
        for s in outer:
            h0, h1 = s.draw(rng, _rng.BLOCK)[:size], s.draw(rng, _rng.BLOCK)[:size]
            deltas.append(g.sub_idx(h1, h0))
        out = np.empty(size)
        step = max(1, _CHUNK // g.order)
        for lo in range(0, size, step):
            hi = min(size, lo + step)
            F = np.broadcast_to(vals, (hi - lo, g.order))
            for dl in deltas:
                perm = g.sub_idx(x[None, :], dl[lo:hi, None])
                F = F * np.take_along_axis(F, perm, axis=1).conj()
            ac = autocorrelation_values(g, F)
            out[lo:hi] = (ac[:, last.support] @ last.weights).real
        return out

    draws = np.concatenate(_rng.map_ordered(block, list(_rng.blocks(samples)), threads))
    raw = float(draws.mean())
    se = float(draws.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return _result(raw, d, "monte_carlo", samples, se)


def box_norm(f, qs, d=None, budget=DEFAULT_BUDGET, samples=None, seed=None, threads=1) -> NormResult:
    """Exact when within budget; otherwise Monte-Carlo if ``samples`` and ``seed`` are given."""
    try:
        return box_norm_exact(f, qs, d, budget=budget, threads=threads)
    except ResourceError:
        if samples is None or seed is None:
            raise
        return box_norm_mc(f, qs, d, samples=samples, seed=seed, threads=threads)


# ---------------------------------------------------------------------------
# inner products and dual functions


def _omega_list(d):
    # bit i-1 of the list position is omega_i
    return [tuple((j >> i) & 1 for i in range(d)) for j in range(2**d)]


def _normalise_family(fs, d, skip_zero):
    omegas = _omega_list(d)
    if skip_zero:
        omegas = omegas[1:]
    if isinstance(fs, dict):
        fs = [fs[om] for om in omegas]
    fs = list(fs)
    if len(fs) != len(omegas):
        raise ArgumentError(f"expected {len(omegas)} functions for d={d}, got {len(fs)}")
    g = fs[0].group
    for h in fs:
        if h.group != g:
            raise StructuralError("functions live on different groups")
    return g, omegas, fs


def _cube_average(g: GroupSpec, omegas, fs, levels, conj_shift: int, budget):
    """``E_{delta_i in Q_i - Q_i} prod_omega C^{|omega|+conj_shift} T^{omega.delta} f_omega``.

    Returns the full function of x (before integration).
    """
    d = len(levels)
    cost = float(g.order) * len(fs)
    for lv in levels:
        cost *= lv.size
    if budget is not None and cost > budget:
        raise ResourceError(f"cube average needs ~{cost:.3g} operations, budget {budget:.3g}", cost=cost, budget=budget)
    x = np.arange(g.order, dtype=np.int64)
    last = levels[-1]
    out = np.zeros(g.order, dtype=complex)
    for outer in itertools.product(*[range(lv.size) for lv in levels[:-1]]):
        w_outer = 1.0
        for lv, j in zip(levels[:-1], outer):
            w_outer *= lv.weights[j]
        prod = np.ones((last.size, g.order), dtype=complex)
        for om, fo in zip(omegas, fs):
            shift = np.zeros(last.size, dtype=np.int64)
            for i in range(d - 1):
                if om[i]:
                    shift = g.add_idx(shift, levels[i].support[outer[i]])
            if om[d - 1]:
                shift = g.add_idx(shift, last.support)
            idx = g.sub_idx(x[None, :], shift[:, None])
            vals = fo.values[idx]
            prod *= vals.conj() if (sum(om) + conj_shift) % 2 else vals
        out += w_outer * (last.weights @ prod)
    return out


def gowers_inner_product(fs, qs, d=None, budget=DEFAULT_BUDGET) -> complex:
    """``<(f_omega)>_{box^d_{Q_1..Q_d}}``.

    ``fs`` is a list of 2^d tables with ``omega_i`` the (i-1)-th bit of the
    list position, or a dict keyed by omega tuples.
    """
    d = len(qs) if d is None else d
    if d < 1 or len(qs) != d:
        raise ArgumentError("need d >= 1 and one multiset per direction")
    g, omegas, fs = _normalise_family(fs, d, skip_zero=False)
    # substitute x -> x + sum_i h_i^0: only the differences h_i^1 - h_i^0 matter
    levels = _levels(g, qs)
    return complex(_cube_average(g, omegas, fs, levels, 0, budget).mean())


def dual_function(fs, qs, d=None, budget=DEFAULT_BUDGET) -> FunctionTable:
    """``E_{h_i in Q_i - Q_i} prod_{omega != 0} C^{|omega|-1} T^{omega.h} f_omega``.

    ``fs`` holds the 2^d - 1 tables for omega != 0 in list-position order
    (position j + 1 of the full cube), or a dict keyed by omega tuples.
    The d = 0 case has no inputs to carry a group; see ``dual_function_zero``.
    """
    d = len(qs) if d is None else d
    if d < 1 or len(qs) != d:
        raise ArgumentError("need d >= 1 and one multiset per direction; see dual_function_zero")
    g, omegas, fs = _normalise_family(fs, d, skip_zero=True)
    levels = _levels(g, qs)
    return FunctionTable(g, _cube_average(g, omegas, fs, levels, 1, budget))


def dual_function_zero(group: GroupSpec) -> FunctionTable:
    """The d = 0 convention: the dual function is identically 1."""
    return FunctionTable.constant(group, 1.0)
