"""Multisets, sumsets and symmetric coset progressions.

Averages over a progression are always taken over its index space
H x {-floor(N_1)..floor(N_1)} x ..., i.e. with multiplicity. Each element of
the torsion subgroup H carries multiplicity one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _rng
from .errors import ArgumentError, ResourceError, StructuralError
from .group import DEFAULT_SUBGROUP_CAP, GroupElement, GroupSpec, SubgroupSpec, as_element

ENUMERATION_CAP = 10**7
_COUNT_LIMIT = 2**63 - 1


# ---------------------------------------------------------------------------
# histogram helpers (dense int64 arrays of length group.order)


def convolve_counts(group: GroupSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact group convolution ``c(x) = sum_{u+v=x} a(u) b(v)`` of count arrays."""
    ta, tb = int(a.sum()), int(b.sum())
    if ta and tb and ta > _COUNT_LIMIT // tb:
        raise ResourceError("multiset total overflows a 64-bit count", cost=ta * tb)
    sa, sb = np.flatnonzero(a), np.flatnonzero(b)
    if len(sa) > len(sb):
        a, b, sa, sb = b, a, sb, sa
    n = group.order
    if len(sa) * n <= 5 * 10**7 or ta * tb >= 2**50:
        out = np.zeros(group.shape, dtype=np.int64)
        bnd = b.reshape(group.shape)
        coords = group.coords(sa)
        for w, c in zip(a[sa], coords):
            out += w * np.roll(bnd, tuple(c), axis=tuple(range(group.rank)))
        return out.reshape(-1)
    fa = np.fft.fftn(a.reshape(group.shape).astype(float))
    fb = np.fft.fftn(b.reshape(group.shape).astype(float))
    return np.rint(np.fft.ifftn(fa * fb).real).astype(np.int64).reshape(-1)


def reflect_counts(group: GroupSpec, a: np.ndarray) -> np.ndarray:
    """``a(-x)``."""
    out = np.zeros_like(a)
    out[group.neg_idx(np.arange(group.order))] = a
    return out


def difference_counts(group: GroupSpec, a: np.ndarray) -> np.ndarray:
    """Histogram of the difference multiset Q - Q."""
    return convolve_counts(group, a, reflect_counts(group, a))


# ---------------------------------------------------------------------------


class Multiset:
    """Finite non-empty multiset of group elements with 64-bit multiplicities."""

    def __init__(self, group: GroupSpec, indices, mults=None):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        if mults is None:
            mults = np.ones_like(idx)
        mults = np.asarray(mults, dtype=np.int64).reshape(-1)
        if len(idx) != len(mults):
            raise StructuralError("indices and multiplicities differ in length")
        if len(idx) == 0:
            raise ArgumentError("multisets must be non-empty")
        if np.any(mults < 1):
            raise ArgumentError("multiplicities must be >= 1")
        if np.any((idx < 0) | (idx >= group.order)):
            raise StructuralError("index outside the group")
        uniq, inv = np.unique(idx, return_inverse=True)
        self.group = group
        self.indices = uniq
        self.mults = np.bincount(inv, weights=None, minlength=len(uniq)).astype(np.int64)
        if not np.all(mults == 1):
            self.mults = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(self.mults, inv, mults)
        self._cum = None

    @classmethod
    def from_elements(cls, group: GroupSpec, elements: Iterable) -> "Multiset":
        return cls(group, [as_element(group, e).index for e in elements])

    @classmethod
    def from_counts(cls, group: GroupSpec, counts: np.ndarray) -> "Multiset":
        counts = np.asarray(counts, dtype=np.int64)
        nz = np.flatnonzero(counts)
        return cls(group, nz, counts[nz])

    @classmethod
    def whole(cls, group: GroupSpec) -> "Multiset":
        return cls(group, np.arange(group.order))

    @property
    def total(self) -> int:
        return int(self.mults.sum())

    def __len__(self):
        return self.total

    @property
    def entries(self) -> dict[GroupElement, int]:
        return {self.group.element_of(i): int(m) for i, m in zip(self.indices, self.mults)}

    def histogram(self) -> np.ndarray:
        h = np.zeros(self.group.order, dtype=np.int64)
        h[self.indices] = self.mults
        return h

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self._cum is None:
            self._cum = np.cumsum(self.mults)
        u = rng.integers(0, self.total, size=size)
        return self.indices[np.searchsorted(self._cum, u, side="right")]

    def average(self, fn) -> complex:
        """``E_{a in A} fn(a)`` counting multiplicity."""
        vals = np.array([fn(self.group.element_of(i)) for i in self.indices])
        return (vals * self.mults).sum() / self.total

    def __eq__(self, other):
        return (
            isinstance(other, Multiset)
            and self.group == other.group
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.mults, other.mults)
        )

    def __add__(self, other):
        return sumset(self, other)

    def __sub__(self, other):
        return difference_set(self, other)

    def to_json(self) -> list:
        return [
            {"element": list(self.group.element_of(i).residues), "mult": int(m)}
            for i, m in zip(self.indices, self.mults)
        ]

    @classmethod
    def from_json(cls, group: GroupSpec, data: Sequence[dict]) -> "Multiset":
        return cls(
            group,
            [as_element(group, d["element"]).index for d in data],
            [d.get("mult", 1) for d in data],
        )

    def __repr__(self):
        items = ", ".join(f"{self.group.element_of(i).residues}:{m}" for i, m in zip(self.indices[:8], self.mults[:8]))
        more = ", ..." if len(self.indices) > 8 else ""
        return f"Multiset({items}{more}; total={self.total})"


def sumset(a: Multiset, b: Multiset) -> Multiset:
    if a.group != b.group:
        raise StructuralError("sumset of multisets in different groups")
    return Multiset.from_counts(a.group, convolve_counts(a.group, a.histogram(), b.histogram()))


def difference_set(a: Multiset, b: Multiset) -> Multiset:
    if a.group != b.group:
        raise StructuralError("difference set of multisets in different groups")
    g = a.group
    return Multiset.from_counts(g, convolve_counts(g, a.histogram(), reflect_counts(g, b.histogram())))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetProgression:
    """``H + {n1 v1 + ... + nr vr : |ni| <= Ni}`` counted with multiplicity."""

    subgroup: SubgroupSpec
    generators: tuple[GroupElement, ...]
    bounds: tuple[float, ...]

    def __init__(self, subgroup: SubgroupSpec, generators: Sequence = (), bounds: Sequence[float] = ()):
        group = subgroup.group
        gens = tuple(as_element(group, v) for v in generators)
        bounds = tuple(float(b) for b in bounds)
        if len(gens) != len(bounds):
            raise StructuralError("one bound per generator required")
        if any(not math.isfinite(b) or b < 0 for b in bounds):
            raise ArgumentError(f"bounds must be finite and non-negative, got {bounds}")
        object.__setattr__(self, "subgroup", subgroup)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def arithmetic(cls, group: GroupSpec, step, bound: float) -> "CosetProgression":
        """Rank-one progression ``{n * step : |n| <= bound}`` with trivial H."""
        return cls(SubgroupSpec.trivial(group), [step], [bound])

    @classmethod
    def from_subgroup(cls, subgroup: SubgroupSpec) -> "CosetProgression":
        return cls(subgroup)

    @classmethod
    def whole(cls, group: GroupSpec) -> "CosetProgression":
        return cls(SubgroupSpec.whole(group))

    @property
    def group(self) -> GroupSpec:
        return self.subgroup.group

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def index_space(self) -> "IndexSpace":
        return IndexSpace(self)

    @property
    def total(self) -> int:
        return self.index_space.size

    def histogram(self) -> np.ndarray:
        return self.index_space.histogram()

    def draw(self, rng, size):
        return self.index_space.draw(rng, size)

    def to_multiset(self) -> Multiset:
        return Multiset.from_counts(self.group, self.histogram())

    def __add__(self, other):
        return progression_sum(self, other)

    def to_config(self) -> dict:
        return {
            "subgroup_generators": [list(g.residues) for g in self.subgroup.generators],
            "generators": [list(g.residues) for g in self.generators],
            "bounds": list(self.bounds),
        }

    @classmethod
    def from_config(cls, group: GroupSpec, cfg: dict) -> "CosetProgression":
        return cls(
            SubgroupSpec(group, cfg.get("subgroup_generators", [])),
            cfg.get("generators", []),
            cfg.get("bounds", []),
        )


class IndexSpace:
    """The tuple domain ``H x prod{-floor(Ni)..floor(Ni)}`` of a progression."""

    def __init__(self, q: CosetProgression, cap: int = DEFAULT_SUBGROUP_CAP):
        self.progression = q
        self.group = q.group
        self.h = q.subgroup.indices(cap)
        self.radii = tuple(int(math.floor(b)) for b in q.bounds)
        self.gen_idx = np.array([v.index for v in q.generators], dtype=np.int64)

    @property
    def size(self) -> int:
        s = len(self.h)
        for r in self.radii:
            s *= 2 * r + 1
        return s

    @property
    def total(self) -> int:
        return self.size

    def __len__(self):
        return self.size

    def same_as(self, other: "IndexSpace") -> bool:
        return (
            self.group == other.group
            and np.array_equal(self.h, other.h)
            and self.radii == other.radii
            and np.array_equal(self.gen_idx, other.gen_idx)
        )

    def _evaluate(self, h_idx, ns) -> np.ndarray:
        coords = self.group.coords(h_idx)
        for j, v in enumerate(self.gen_idx):
            coords = coords + ns[j][..., None] * self.group.coords(v)
        return self.group.flat(coords)

    def elements(self, cap: int = ENUMERATION_CAP) -> np.ndarray:
        """Flat indices of every tuple, in lexicographic tuple order."""
        if self.size > cap:
            raise ResourceError(f"index space has {self.size} tuples, cap is {cap}", cost=self.size, budget=cap)
        axes = [np.arange(len(self.h))] + [np.arange(-r, r + 1) for r in self.radii]
        grids = np.meshgrid(*axes, indexing="ij")
        grids = [g.reshape(-1) for g in grids]
        return self._evaluate(self.h[grids[0]], grids[1:])

    def histogram(self) -> np.ndarray:
        g = self.group
        out = np.zeros(g.order, dtype=np.int64)
        out[self.h] = 1
        for v, r in zip(self.gen_idx, self.radii):
            line = np.zeros(g.order, dtype=np.int64)
            np.add.at(line, g.scale_idx(np.int64(v), np.arange(-r, r + 1)), 1)
            out = convolve_counts(g, out, line)
        return out

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        h_idx = self.h[rng.integers(0, len(self.h), size=size)]
        ns = [rng.integers(-r, r + 1, size=size) for r in self.radii]
        return self._evaluate(h_idx, ns)


def dilate(q: CosetProgression, eps: float) -> CosetProgression:
    if not eps > 0:
        raise ArgumentError(f"dilation factor must be positive, got {eps}")
    return CosetProgression(q.subgroup, q.generators, [eps * b for b in q.bounds])


def progression_sum(q1: CosetProgression, q2: CosetProgression) -> CosetProgression:
    if q1.group != q2.group:
        raise StructuralError("progressions live in different groups")
    h = q1.subgroup + q2.subgroup
    h.indices()  # enforce the closure cap now
    return CosetProgression(h, q1.generators + q2.generators, q1.bounds + q2.bounds)


def sample(space, seed: int, index: int, stream: int = 0) -> GroupElement:
    """The ``index``-th draw of the counter-based stream ``seed`` from ``space``."""
    block, offset = divmod(int(index), _rng.BLOCK)
    draws = space.draw(_rng.block_rng(seed, block, stream), _rng.BLOCK)
    return space.group.element_of(int(draws[offset]))


def sample_many(space, seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Flat indices of draws ``0..n-1``; equal to ``[sample(space, seed, i) ...]``."""
    out = []
    for b, size in _rng.blocks(n):
        out.append(space.draw(_rng.block_rng(seed, b, stream), _rng.BLOCK)[:size])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def as_shift_set(group: GroupSpec, q):
    """Accept a CosetProgression, IndexSpace, Multiset or subgroup as an averaging multiset."""
    if isinstance(q, SubgroupSpec):
        q = CosetProgression.from_subgroup(q)
    if isinstance(q, (CosetProgression, IndexSpace, Multiset)):
        if q.group != group:
            raise StructuralError("averaging multiset lives in a different group")
        return q
    raise ArgumentError(f"cannot average over {type(q).__name__}")


def dump_multiset(m: Multiset) -> str:
    return json.dumps(m.to_json())
