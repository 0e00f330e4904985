"""Certified lower bounds for the epsilon-perturbed dual uniformity norm

    sup { |<f, g>| : ||g||_inf <= 1, ||g||_{U^d_{eps Q}} <= eps }.

The supremum is over a convex, circled set (the constraint is a seminorm
ball), so |<f,g>| can be maximised as Re <f,g>. Only lower bounds with
explicit, re-verified witnesses are produced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ResourceError
from .funcspace import FunctionTable
from .gowers import power_mean_fn
from .progression import CosetProgression, dilate
from .group import SubgroupSpec

FEAS_TOL = 1e-9


@dataclass(frozen=True)
class DualWitness:
    g: FunctionTable
    inner: float
    sup_norm: float
    u_norm: float
    eps: float
    strategy: str = ""

    @property
    def feasible(self) -> bool:
        return self.sup_norm <= 1 + FEAS_TOL and self.u_norm <= self.eps + FEAS_TOL

    def to_json(self) -> dict:
        return {
            "inner": self.inner,
            "sup_norm": self.sup_norm,
            "u_norm": self.u_norm,
            "eps": self.eps,
            "strategy": self.strategy,
        }


def _dilated(q, eps):
    if isinstance(q, SubgroupSpec):
        q = CosetProgression.from_subgroup(q)
    if not isinstance(q, CosetProgression):
        raise ArgumentError("the dual norm needs a coset progression (dilates are undefined otherwise)")
    return dilate(q, eps)


class _Problem:
    def __init__(self, f: FunctionTable, q, d: int, eps: float):
        if eps <= 0:
            raise ArgumentError("eps must be positive")
        if d < 1:
            raise ArgumentError("d must be >= 1")
        self.f = f
        self.d = d
        self.eps = float(eps)
        self.power = power_mean_fn(f.group, [_dilated(q, eps)] * d)

    def unorm(self, vals: np.ndarray) -> np.ndarray:
        raw = self.power(np.atleast_2d(vals)).real
        return np.maximum(raw, 0.0) ** (1.0 / 2**self.d)

    def inner(self, vals: np.ndarray) -> np.ndarray:
        vals = np.atleast_2d(vals)
        return np.abs(vals.conj() @ self.f.values) / self.f.group.order

    def make_feasible(self, vals: np.ndarray) -> np.ndarray:
        """Clip moduli to 1, then scale down into the U-ball (the norm is homogeneous)."""
        vals = np.atleast_2d(vals).astype(complex)
        mod = np.abs(vals)
        vals = np.where(mod > 1, vals / np.where(mod > 0, mod, 1), vals)
        u = self.unorm(vals)
        scale = np.where(u > self.eps, self.eps / np.where(u > 0, u, 1) * (1 - 1e-12), 1.0)
        return vals * scale[:, None]

    def witness(self, vals: np.ndarray, strategy: str) -> DualWitness:
        vals = np.asarray(vals, dtype=complex).reshape(-1)
        g = FunctionTable(self.f.group, vals)
        return DualWitness(
            g,
            float(self.inner(vals)[0]),
            g.sup_norm,
            float(self.unorm(vals)[0]),
            self.eps,
            strategy,
        )

    def best(self, cands: np.ndarray):
        feas = self.make_feasible(cands)
        scores = self.inner(feas)
        j = int(np.argmax(scores))
        return feas[j], float(scores[j])


def _phase(v):
    m = np.abs(v)
    return np.where(m > 0, v / np.where(m > 0, m, 1), 0)


def _characters(group, limit, rng):
    n = group.order
    coords = group.coords(np.arange(n))
    xis = np.arange(n) if n <= limit else rng.choice(n, size=limit, replace=False)
    out = []
    for xi in xis:
        xc = group.coords(xi)
        ph = sum(coords[:, j] * int(xc[j]) / m for j, m in enumerate(group.moduli))
        out.append(np.exp(2j * np.pi * np.asarray(ph, dtype=float)))
    return np.array(out)


def _ascent(prob: _Problem, g0: np.ndarray, iters: int):
    f = prob.f.values
    g = g0.copy()
    score = float(prob.inner(g)[0])
    step = 1.0
    for _ in range(iters):
        cand = prob.make_feasible(g + step * f / max(np.abs(f).max(), 1e-300))[0]
        # bisect along the segment from the current feasible point
        lo, hi, best = 0.0, 1.0, None
        raw = g + step * f / max(np.abs(f).max(), 1e-300)
        mod = np.abs(raw)
        raw = np.where(mod > 1, raw / np.where(mod > 0, mod, 1), raw)
        if prob.unorm(raw)[0] <= prob.eps:
            best = raw
        else:
            for _ in range(20):
                mid = 0.5 * (lo + hi)
                trial = g + mid * (raw - g)
                if prob.unorm(trial)[0] <= prob.eps:
                    lo, best = mid, trial
                else:
                    hi = mid
        options = [cand] + ([best] if best is not None else [])
        scores = [float(prob.inner(o)[0]) for o in options]
        j = int(np.argmax(scores))
        if scores[j] > score * (1 + 1e-12) + 1e-15:
            g, score = options[j], scores[j]
            step = min(step * 1.5, 4.0)
        else:
            step *= 0.5
            if step < 1e-6:
                break
    return g, score


def dual_norm_lower_bound(
    f: FunctionTable,
    q,
    d: int,
    eps: float,
    strategy: str = "all",
    budget: int = 2000,
    seed: int = 0,
) -> DualWitness:
    """Best feasible witness found by ``strategy``.

    ``strategy`` is one of ``random`` (random +-1 tables scaled into
    feasibility), ``characters`` (scaled characters and the phase of f),
    ``ascent`` (projected ascent on Re<f,g> from the best of the others) or
    ``all``. ``budget`` bounds the number of candidates / ascent iterations.
    """
    prob = _Problem(f, q, d, eps)
    n = f.group.order
    if not np.any(f.values):
        return prob.witness(np.zeros(n), strategy)
    rng = np.random.default_rng(seed)
    pool = []
    if strategy in ("random", "all", "ascent"):
        k = max(1, min(budget, 256))
        pool.append((rng.choice([-1.0, 1.0], size=(k, n)), "random"))
    if strategy in ("characters", "all", "ascent"):
        chars = _characters(f.group, max(1, min(budget, 512)), rng)
        # the phase of f maximises <f,g> under the sup-norm constraint alone
        pool.append((np.vstack([chars, _phase(f.values)[None, :], f.values[None, :]]), "characters"))
    if not pool:
        raise ArgumentError(f"unknown strategy {strategy!r}")
    best_vals, best_score, best_name = np.zeros(n, dtype=complex), 0.0, strategy
    for cands, name in pool:
        vals, score = prob.best(cands)
        if score > best_score:
            best_vals, best_score, best_name = vals, score, name
    if strategy in ("ascent", "all"):
        starts = [best_vals, prob.make_feasible(_phase(f.values))[0], prob.make_feasible(f.values)[0]]
        for s in starts:
            vals, score = _ascent(prob, s, iters=max(10, min(budget, 400)))
            if score > best_score:
                best_vals, best_score, best_name = vals, score, "ascent"
    w = prob.witness(best_vals, best_name)
    if not w.feasible:
        return prob.witness(np.zeros(n), best_name)
    return w


def dual_norm_oracle_tiny(f: FunctionTable, q, d: int, eps: float, phase_levels: int = 8) -> DualWitness:
    """Exhaustive maximum over g with values in {0} and the phase_levels-th roots of unity."""
    n = f.group.order
    alphabet = np.concatenate([[0], np.exp(2j * np.pi * np.arange(phase_levels) / phase_levels)])
    count = len(alphabet) ** n
    if count > 10**8:
        raise ResourceError(f"oracle would enumerate {count} tables", cost=count, budget=10**8)
    prob = _Problem(f, q, d, eps)
    best_vals, best_score = np.zeros(n, dtype=complex), 0.0
    batch = 4096
    it = itertools.product(range(len(alphabet)), repeat=n)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        cands = alphabet[np.array(chunk)]
        ok = prob.unorm(cands) <= eps + FEAS_TOL
        if not ok.any():
            continue
        cands = cands[ok]
        scores = prob.inner(cands)
        j = int(np.argmax(scores))
        if scores[j] > best_score:
            best_vals, best_score = cands[j], float(scores[j])
    return prob.witness(best_vals, "oracle")
