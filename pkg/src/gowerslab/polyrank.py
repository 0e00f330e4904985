"""Exact checks for "polynomial of degree <d along H" and "rank <(H_1,...,H_d)".

Two independent routes are provided and cross-validated in the test suite:

* ``recursive`` follows the recursive definitions literally: P has degree <d
  along H iff every difference P(. + h) - P has degree <d-1 (and degree <0
  means identically zero). Distinct intermediate functions are memoised.
* ``difference`` enumerates d-tuples of shifts and checks that every iterated
  difference vanishes identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ResourceError, StructuralError
from .group import GroupSpec, SubgroupSpec

EXHAUSTIVE_BUDGET = 10**8
TORUS_TOL = 1e-9


class PolyFunction:
    """A map G -> K with K = Z/M (``modulus=M``) or the torus R/Z (``modulus=None``)."""

    def __init__(self, domain: GroupSpec, values, modulus: int | None = 5):
        vals = np.asarray(values)
        if vals.size != domain.order:
            raise StructuralError(f"{vals.size} values for a group of order {domain.order}")
        if modulus is None:
            vals = np.mod(vals.astype(float).reshape(-1), 1.0)
        else:
            if modulus < 1:
                raise ArgumentError("codomain modulus must be positive")
            if vals.dtype.kind not in "iub":
                raise ArgumentError("values must be integers for a cyclic codomain")
            vals = np.mod(vals.astype(np.int64).reshape(-1), modulus)
        self.domain = domain
        self.modulus = modulus
        self.values = vals

    @classmethod
    def from_function(cls, domain: GroupSpec, fn, modulus: int | None = 5) -> "PolyFunction":
        coords = domain.coords(np.arange(domain.order))
        return cls(domain, np.array([fn(*c) for c in coords]), modulus)

    def __call__(self, x) -> int | float:
        from .group import as_element

        v = self.values[as_element(self.domain, x).index]
        return float(v) if self.modulus is None else int(v)

    def is_zero(self) -> bool:
        return bool(_zero_rows(self.values[None, :], self.modulus)[0])

    def __eq__(self, other):
        return (
            isinstance(other, PolyFunction)
            and self.domain == other.domain
            and self.modulus == other.modulus
            and bool(_zero_rows((self.values - other.values)[None, :], self.modulus)[0])
        )

    def __add__(self, other: "PolyFunction") -> "PolyFunction":
        return PolyFunction(self.domain, self.values + other.values, self.modulus)


def _reduce(vals, modulus):
    return np.mod(vals, 1.0 if modulus is None else modulus)


def _zero_rows(rows: np.ndarray, modulus) -> np.ndarray:
    if modulus is None:
        r = np.mod(rows + 0.5, 1.0) - 0.5
        return np.all(np.abs(r) <= TORUS_TOL, axis=-1)
    return ~np.any(rows, axis=-1)


def _plus_perm(group: GroupSpec, h_idx: int) -> np.ndarray:
    return group.add_idx(np.arange(group.order), h_idx)


def additive_difference(p: PolyFunction, h) -> PolyFunction:
    """``P_h(x) = P(x + h) - P(x)`` in the codomain arithmetic."""
    from .group import as_element

    h = as_element(p.domain, h)
    vals = p.values[_plus_perm(p.domain, h.index)] - p.values
    return PolyFunction(p.domain, vals, p.modulus)


@dataclass
class PolyCertificate:
    verdict: bool
    witness: tuple | None = None  # (shifts tuple, x) with a nonvanishing iterated difference
    checked_pairs: int = 0
    mode: str = "difference"
    statistical: bool = False
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_json(self) -> dict:
        wit = None
        if self.witness is not None:
            hs, x = self.witness
            wit = {"shifts": [list(h.residues) for h in hs], "x": list(x.residues)}
        return {
            "verdict": self.verdict,
            "label": ("no counterexample found" if self.verdict else "counterexample")
            if self.statistical
            else ("holds" if self.verdict else "fails"),
            "witness": wit,
            "checked_pairs": self.checked_pairs,
            "mode": self.mode,
            "statistical": self.statistical,
        }


def iterated_difference(p: PolyFunction, shifts) -> PolyFunction:
    out = p
    for h in shifts:
        out = additive_difference(out, h)
    return out


def verify_witness(p: PolyFunction, cert: PolyCertificate) -> bool:
    """True when the certificate's witness really has a nonzero iterated difference."""
    if cert.witness is None:
        return False
    hs, x = cert.witness
    v = iterated_difference(p, hs).values[x.index]
    return not bool(_zero_rows(np.array([[v]]), p.modulus)[0])


# ---------------------------------------------------------------------------
# difference mode


def _expand_all(p: PolyFunction, choice_sets: list[np.ndarray], sorted_tuples: bool):
    """Iterated differences for every tuple (one shift per choice set), vectorised per level.

    Yields (tuple-index array, rows) for the final level, split by the first shift
    so memory stays bounded.
    """
    g = p.domain
    perms_cache: dict[int, np.ndarray] = {}

    def perm(h):
        if h not in perms_cache:
            perms_cache[h] = _plus_perm(g, int(h))
        return perms_cache[h]

    first = choice_sets[0]
    for a, h0 in enumerate(first):
        rows = _reduce(p.values[perm(h0)] - p.values, p.modulus)[None, :]
        tuples = np.array([[a]], dtype=np.int64)
        for level in range(1, len(choice_sets)):
            cs = choice_sets[level]
            new_rows, new_tuples = [], []
            for b, h in enumerate(cs):
                mask = tuples[:, -1] <= b if sorted_tuples else np.ones(len(tuples), bool)
                if not mask.any():
                    continue
                sub = rows[mask]
                new_rows.append(_reduce(sub[:, perm(h)] - sub, p.modulus))
                t = tuples[mask]
                new_tuples.append(np.hstack([t, np.full((len(t), 1), b)]))
            rows = np.vstack(new_rows)
            tuples = np.vstack(new_tuples)
        yield tuples, rows


def _difference_check(p: PolyFunction, choice_sets, sorted_tuples) -> PolyCertificate:
    g = p.domain
    checked = 0
    for tuples, rows in _expand_all(p, choice_sets, sorted_tuples):
        checked += len(tuples)
        zero = _zero_rows(rows, p.modulus)
        if not zero.all():
            r = int(np.flatnonzero(~zero)[0])
            nz = rows[r]
            bad = ~_zero_rows(nz[:, None], p.modulus)
            x = int(np.flatnonzero(bad)[0])
            hs = tuple(g.element_of(int(choice_sets[i][j])) for i, j in enumerate(tuples[r]))
            return PolyCertificate(False, (hs, g.element_of(x)), checked, "difference")
    return PolyCertificate(True, None, checked, "difference")


# ---------------------------------------------------------------------------
# recursive mode


class _Recursion:
    """Literal recursion over the definitions, memoised on (function, remaining directions)."""

    def __init__(self, p: PolyFunction, subgroups: list[np.ndarray]):
        self.p = p
        self.g = p.domain
        self.subgroups = subgroups
        self.perms = [np.stack([_plus_perm(self.g, int(h)) for h in hs]) for hs in subgroups]
        self.memo: dict = {}
        self.checked = 0

    def run(self, vals: np.ndarray, remaining: tuple) -> tuple | None:
        """None if the property holds, else (list of (subgroup, shift index), x)."""
        if not remaining:
            zero = _zero_rows(vals[:, None], self.p.modulus)
            if zero.all():
                return None
            return ([], int(np.flatnonzero(~zero)[0]))
        key = (vals.tobytes(), remaining)
        if key in self.memo:
            return self.memo[key]
        result = None
        for pos, s in enumerate(remaining):
            # P_h = P(. + h) - P for every h in H_s at once
            diffs = _reduce(vals[self.perms[s]] - vals[None, :], self.p.modulus)
            self.checked += len(diffs)
            rest = remaining[:pos] + remaining[pos + 1 :]
            uniq, first = np.unique(diffs, axis=0, return_index=True)
            for row, j in zip(uniq, first):
                sub = self.run(np.ascontiguousarray(row), rest)
                if sub is not None:
                    result = ([(s, int(j))] + sub[0], sub[1])
                    break
            if result is not None:
                break
            if len(set(remaining)) == 1:
                break  # identical directions: one branch covers all
        self.memo[key] = result
        return result

    def certificate(self, remaining) -> PolyCertificate:
        res = self.run(self.p.values, tuple(remaining))
        if res is None:
            return PolyCertificate(True, None, self.checked, "recursive")
        path, x = res
        hs = tuple(self.g.element_of(int(self.subgroups[s][j])) for s, j in path)
        return PolyCertificate(False, (hs, self.g.element_of(x)), self.checked, "recursive")


# ---------------------------------------------------------------------------


def _sampled_check(p: PolyFunction, choice_sets, samples: int, seed: int) -> PolyCertificate:
    rng = np.random.default_rng(seed)
    g = p.domain
    for s in range(samples):
        hs = tuple(g.element_of(int(rng.choice(cs))) for cs in choice_sets)
        vals = iterated_difference(p, hs).values
        zero = _zero_rows(vals[:, None], p.modulus)
        if not zero.all():
            x = g.element_of(int(np.flatnonzero(~zero)[0]))
            return PolyCertificate(False, (hs, x), s + 1, "sampled", statistical=True)
    return PolyCertificate(True, None, samples, "sampled", statistical=True)


def _zero_certificate(p: PolyFunction, mode) -> PolyCertificate:
    zero = _zero_rows(p.values[:, None], p.modulus)
    if zero.all():
        return PolyCertificate(True, None, 1, mode)
    return PolyCertificate(False, ((), p.domain.element_of(int(np.flatnonzero(~zero)[0]))), 1, mode)


def _check_group(p: PolyFunction, h: SubgroupSpec):
    if h.group != p.domain:
        raise StructuralError("subgroup does not live in the polynomial's domain")


def degree_check(
    p: PolyFunction,
    h: SubgroupSpec,
    d: int,
    mode: str = "difference",
    budget: int = EXHAUSTIVE_BUDGET,
    samples: int | None = None,
    seed: int | None = None,
) -> PolyCertificate:
    """Is ``p`` a polynomial of degree <d along ``h``?"""
    _check_group(p, h)
    if d <= 0:
        return _zero_certificate(p, mode)
    hs = h.indices()
    cost = float(len(hs)) ** d * p.domain.order
    if cost > budget or mode == "sampled":
        if samples is None or seed is None:
            raise ResourceError(
                f"exhaustive degree check costs {cost:.3g} > budget {budget:.3g}; pass samples and seed",
                cost=cost,
                budget=budget,
            )
        return _sampled_check(p, [hs] * d, samples, seed)
    if mode == "difference":
        return _difference_check(p, [hs] * d, sorted_tuples=True)
    if mode == "recursive":
        return _Recursion(p, [hs]).certificate([0] * d)
    raise ArgumentError(f"unknown mode {mode!r}")


def rank_check(
    p: PolyFunction,
    hs: list[SubgroupSpec],
    mode: str = "difference",
    budget: int = EXHAUSTIVE_BUDGET,
    samples: int | None = None,
    seed: int | None = None,
) -> PolyCertificate:
    """Does ``p`` have rank <(H_1, ..., H_d)?"""
    for h in hs:
        _check_group(p, h)
    if not hs:
        return _zero_certificate(p, mode)
    sets = [h.indices() for h in hs]
    cost = float(p.domain.order)
    for s in sets:
        cost *= len(s)
    if cost > budget or mode == "sampled":
        if samples is None or seed is None:
            raise ResourceError(
                f"exhaustive rank check costs {cost:.3g} > budget {budget:.3g}; pass samples and seed",
                cost=cost,
                budget=budget,
            )
        return _sampled_check(p, sets, samples, seed)
    if mode == "difference":
        return _difference_check(p, sets, sorted_tuples=False)
    if mode == "recursive":
        # collapse equal subgroups so the recursion can share branches
        keys, uniq_sets, remaining = {}, [], []
        for s in sets:
            k = s.tobytes()
            if k not in keys:
                keys[k] = len(uniq_sets)
                uniq_sets.append(s)
            remaining.append(keys[k])
        return _Recursion(p, uniq_sets).certificate(sorted(remaining))
    raise ArgumentError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# generators and concatenation property tests


def _poly1(rng, p: int, deg_lt: int) -> np.ndarray:
    """Coefficients of a random polynomial of degree < deg_lt over Z/p."""
    return rng.integers(0, p, size=max(deg_lt, 0))


def _eval1(coeffs, x, p):
    out = np.zeros_like(x)
    for c in coeffs[::-1]:
        out = (out * x + c) % p
    return out


def random_bidegree_poly(rng, p: int, d1: int, d2: int, terms: int | None = None, shear: bool = True):
    """Random P on (Z/p)^2 with degree <d1 along H1 and <d2 along H2.

    P is a sum of at most five products A(u) B(v) where (u, v) are coordinates
    in a random basis of (Z/p)^2 (the standard one when ``shear`` is false),
    H1 is the line along which u varies and H2 the line along which v varies.
    Returns ``(P, H1, H2)``. All-zero draws are redrawn.
    """
    g = GroupSpec((p, p))
    if shear:
        while True:
            basis = rng.integers(0, p, size=(2, 2))
            if int(round(np.linalg.det(basis))) % p:
                break
    else:
        basis = np.eye(2, dtype=np.int64)
    inv = _inverse_mod(basis, p)
    coords = g.coords(np.arange(g.order))
    uv = (coords @ inv.T) % p  # coordinates in the new basis
    h1 = SubgroupSpec(g, [tuple(basis[:, 0])])
    h2 = SubgroupSpec(g, [tuple(basis[:, 1])])
    while True:
        k = terms if terms is not None else int(rng.integers(1, 6))
        vals = np.zeros(g.order, dtype=np.int64)
        for _ in range(k):
            vals = (vals + _eval1(_poly1(rng, p, d1), uv[:, 0], p) * _eval1(_poly1(rng, p, d2), uv[:, 1], p)) % p
        if vals.any() or d1 <= 0 or d2 <= 0:
            return PolyFunction(g, vals, p), h1, h2


def _inverse_mod(m: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = (int(v) for v in m.reshape(-1))
    det_inv = pow((a * d - b * c) % p, -1, p)
    return (np.array([[d, -b], [-c, a]]) * det_inv) % p


def monomial(p: int, d1: int, d2: int) -> tuple[PolyFunction, SubgroupSpec, SubgroupSpec]:
    """``n^(d1-1) m^(d2-1)`` on (Z/p)^2 with the coordinate axes as H1, H2."""
    g = GroupSpec((p, p))
    P = PolyFunction.from_function(g, lambda n, m: pow(int(n), d1 - 1, p) * pow(int(m), d2 - 1, p), p)
    return P, SubgroupSpec(g, [(1, 0)]), SubgroupSpec(g, [(0, 1)])


def random_product_rank(rng, p: int, d1: int, d2: int):
    """Random P on (Z/p)^(d1+d2) of the product form sum_{i,j} f_ij(n1 without i) g_ij(n2 without j).

    Returns ``(P, H1 list, H2 list)`` with H_{1,i}, H_{2,j} the coordinate axes.
    """
    g = GroupSpec((p,) * (d1 + d2))
    coords = g.coords(np.arange(g.order))
    axes = []
    for i in range(d1 + d2):
        e = [0] * (d1 + d2)
        e[i] = 1
        axes.append(SubgroupSpec(g, [e]))
    vals = np.zeros(g.order, dtype=np.int64)
    for i in range(d1):
        for j in range(d2):
            keep1 = [k for k in range(d1) if k != i]
            keep2 = [d1 + k for k in range(d2) if k != j]
            ft = rng.integers(0, p, size=(p,) * len(keep1))
            gt = rng.integers(0, p, size=(p,) * len(keep2))
            fv = ft[tuple(coords[:, k] for k in keep1)] if keep1 else np.full(g.order, ft)
            gv = gt[tuple(coords[:, k] for k in keep2)] if keep2 else np.full(g.order, gt)
            vals = (vals + fv * gv) % p
    return PolyFunction(g, vals, p), axes[:d1], axes[d1:]


def _record(P: PolyFunction, **info) -> dict:
    return {"domain": list(P.domain.moduli), "modulus": P.modulus, "values": P.values.tolist(), **info}


def concat_property_test(config: dict, trials: int, seed: int) -> dict:
    """Draw instances satisfying the concatenation hypotheses and check the conclusion.

    ``config["kind"]`` is ``"polynomial"`` (keys p, d1, d2, shear) or
    ``"rank"`` (keys p, d1, d2). Halts on the first violation with a
    re-verifiable record of the instance.
    """
    kind = config.get("kind", "polynomial")
    p = int(config.get("p", 5))
    d1, d2 = int(config.get("d1", 2)), int(config.get("d2", 2))
    mode = config.get("mode", "difference")
    rng = np.random.default_rng(seed)
    report = {"kind": kind, "p": p, "d1": d1, "d2": d2, "trials": 0, "violations": 0, "hypothesis_failures": 0}
    for t in range(trials):
        if kind == "polynomial":
            P, h1, h2 = random_bidegree_poly(rng, p, d1, d2, shear=config.get("shear", True))
            hyp = degree_check(P, h1, d1, mode) and degree_check(P, h2, d2, mode)
            cert = degree_check(P, h1 + h2, d1 + d2 - 1, mode)
            info = {"h1": [list(g.residues) for g in h1.generators], "h2": [list(g.residues) for g in h2.generators]}
        elif kind == "rank":
            P, hs1, hs2 = random_product_rank(rng, p, d1, d2)
            hyp = rank_check(P, hs1, mode) and rank_check(P, hs2, mode)
            cert = rank_check(P, [a + b for a in hs1 for b in hs2], mode)
            info = {}
        else:
            raise ArgumentError(f"unknown concatenation kind {kind!r}")
        report["trials"] += 1
        if not hyp:
            report["hypothesis_failures"] += 1
            report["counterexample"] = _record(P, trial=t, stage="hypothesis", **info)
            break
        if not cert:
            report["violations"] += 1
            report["counterexample"] = _record(P, trial=t, stage="conclusion", certificate=cert.to_json(), **info)
            break
    return report


def examples_lowrank(p: int, rng) -> list[tuple[PolyFunction, list[SubgroupSpec]]]:
    """The f(n)+g(m) and f(n,m)+g(n,k)+h(m,k) families on (Z/p)^2 and (Z/p)^3."""
    g2 = GroupSpec((p, p))
    c2 = g2.coords(np.arange(g2.order))
    f, gg = rng.integers(0, p, p), rng.integers(0, p, p)
    P2 = PolyFunction(g2, f[c2[:, 0]] + gg[c2[:, 1]], p)
    hs2 = [SubgroupSpec(g2, [(1, 0)]), SubgroupSpec(g2, [(0, 1)])]
    g3 = GroupSpec((p, p, p))
    c3 = g3.coords(np.arange(g3.order))
    F, Gt, Ht = (rng.integers(0, p, (p, p)) for _ in range(3))
    P3 = PolyFunction(g3, F[c3[:, 0], c3[:, 1]] + Gt[c3[:, 0], c3[:, 2]] + Ht[c3[:, 1], c3[:, 2]], p)
    hs3 = [SubgroupSpec(g3, [(1, 0, 0)]), SubgroupSpec(g3, [(0, 1, 0)]), SubgroupSpec(g3, [(0, 0, 1)])]
    return [(P2, hs2), (P3, hs3)]
