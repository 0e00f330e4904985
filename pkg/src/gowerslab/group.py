"""Finite abelian groups presented as products of cyclic groups.

Elements are addressed densely by a mixed-radix index (row-major, last
coordinate fastest), which is exactly the flat layout of a numpy array of
shape ``moduli``. All vectorised helpers work on such flat indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ResourceError, StructuralError

DEFAULT_SUBGROUP_CAP = 2**20


@dataclass(frozen=True)
class GroupSpec:
    """The group Z/N1 x ... x Z/Nk."""

    moduli: tuple[int, ...]

    def __init__(self, moduli: Iterable[int]):
        moduli = tuple(int(m) for m in moduli)
        if any(m < 1 for m in moduli):
            raise ArgumentError(f"moduli must be positive, got {moduli}")
        order = 1
        for m in moduli:
            order *= m
        if order >= 2**63:
            raise ArgumentError("group order does not fit a 64-bit count")
        object.__setattr__(self, "moduli", moduli)

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls((n,))

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return int(np.prod(self.moduli, dtype=np.int64)) if self.moduli else 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.moduli

    def __repr__(self):
        return "GroupSpec(" + " x ".join(f"Z/{m}" for m in self.moduli) + ")"

    # -- elements ---------------------------------------------------------

    def element(self, *residues) -> "GroupElement":
        if len(residues) == 1 and not isinstance(residues[0], (int, np.integer)):
            residues = tuple(residues[0])
        return GroupElement(self, residues)

    @property
    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def element_of(self, index: int) -> "GroupElement":
        index = int(index)
        if not 0 <= index < self.order:
            raise ArgumentError(f"index {index} outside [0, {self.order})")
        return GroupElement(self, np.unravel_index(index, self.moduli) if self.moduli else ())

    def index_of(self, e: "GroupElement") -> int:
        self._check(e)
        return e.index

    def elements(self):
        for i in range(self.order):
            yield self.element_of(i)

    def _check(self, e: "GroupElement"):
        if e.group != self:
            raise StructuralError(f"{e!r} does not belong to {self!r}")

    # -- vectorised index arithmetic -------------------------------------

    @cached_property
    def _radix(self) -> np.ndarray:
        radix = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            radix[i] = radix[i + 1] * self.moduli[i + 1]
        return radix

    def coords(self, idx) -> np.ndarray:
        """Residue coordinates of flat indices, shape ``idx.shape + (rank,)``."""
        idx = np.asarray(idx, dtype=np.int64)
        mod = np.asarray(self.moduli, dtype=np.int64)
        return (idx[..., None] // self._radix) % mod

    def flat(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        mod = np.asarray(self.moduli, dtype=np.int64)
        return ((coords % mod) * self._radix).sum(axis=-1)

    def add_idx(self, a, b) -> np.ndarray:
        return self.flat(self.coords(a) + self.coords(b))

    def sub_idx(self, a, b) -> np.ndarray:
        return self.flat(self.coords(a) - self.coords(b))

    def neg_idx(self, a) -> np.ndarray:
        return self.flat(-self.coords(a))

    def scale_idx(self, a, n) -> np.ndarray:
        """``n * a`` for integer array ``n`` broadcast against ``a``."""
        n = np.asarray(n, dtype=np.int64)
        return self.flat(self.coords(a) * n[..., None])


@dataclass(frozen=True)
class GroupElement:
    group: GroupSpec
    residues: tuple[int, ...]

    def __init__(self, group: GroupSpec, residues: Sequence[int]):
        residues = tuple(int(r) for r in residues)
        if len(residues) != group.rank:
            raise StructuralError(f"element has {len(residues)} coordinates, group {group!r} has {group.rank}")
        residues = tuple(r % m for r, m in zip(residues, group.moduli))
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "residues", residues)

    @property
    def index(self) -> int:
        idx = 0
        for r, m in zip(self.residues, self.group.moduli):
            idx = idx * m + r
        return idx

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self, other)

    def __neg__(self) -> "GroupElement":
        return neg(self)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return add(self, neg(other))

    def __rmul__(self, n: int) -> "GroupElement":
        return GroupElement(self.group, [n * r for r in self.residues])

    def __repr__(self):
        return f"GroupElement{self.residues}"


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.group != b.group:
        raise StructuralError(f"cannot add elements of {a.group!r} and {b.group!r}")
    return GroupElement(a.group, [x + y for x, y in zip(a.residues, b.residues)])


def neg(a: GroupElement) -> GroupElement:
    return GroupElement(a.group, [-x for x in a.residues])


def as_element(group: GroupSpec, e) -> GroupElement:
    """Coerce a GroupElement, a residue sequence or (cyclic groups) an int."""
    if isinstance(e, GroupElement):
        group._check(e)
        return e
    if isinstance(e, (int, np.integer)):
        if group.rank != 1:
            raise StructuralError(f"bare integer {e} is ambiguous in {group!r}")
        return GroupElement(group, (e,))
    return GroupElement(group, e)


@dataclass(frozen=True)
class SubgroupSpec:
    """Subgroup generated by ``generators``; elements are materialised lazily."""

    group: GroupSpec
    generators: tuple[GroupElement, ...] = field(default=())

    def __init__(self, group: GroupSpec, generators: Iterable = ()):
        gens = tuple(as_element(group, g) for g in generators)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "generators", gens)

    @classmethod
    def whole(cls, group: GroupSpec) -> "SubgroupSpec":
        gens = []
        for i in range(group.rank):
            r = [0] * group.rank
            r[i] = 1
            gens.append(r)
        return cls(group, gens)

    @classmethod
    def trivial(cls, group: GroupSpec) -> "SubgroupSpec":
        return cls(group, ())

    def indices(self, cap: int = DEFAULT_SUBGROUP_CAP) -> np.ndarray:
        """Sorted flat indices of the subgroup's elements."""
        return _closure(self.group, tuple(g.index for g in self.generators), cap)

    def __len__(self):
        return len(self.indices())

    def __add__(self, other: "SubgroupSpec") -> "SubgroupSpec":
        if self.group != other.group:
            raise StructuralError("subgroups live in different groups")
        return SubgroupSpec(self.group, self.generators + other.generators)

    def contains(self, e) -> bool:
        e = as_element(self.group, e)
        idx = self.indices()
        pos = np.searchsorted(idx, e.index)
        return pos < len(idx) and idx[pos] == e.index


_closure_cache: dict = {}


def _closure(group: GroupSpec, gen_idx: tuple[int, ...], cap: int) -> np.ndarray:
    key = (group, tuple(sorted(set(gen_idx))))
    hit = _closure_cache.get(key)
    if hit is not None:
        if len(hit) > cap:
            raise ResourceError(f"subgroup has {len(hit)} elements, cap is {cap}", cost=len(hit), budget=cap)
        return hit
    current = np.zeros(1, dtype=np.int64)
    for g in key[1]:
        cyc = _cyclic(group, g)
        small, large = (current, cyc) if len(current) <= len(cyc) else (cyc, current)
        parts = [group.add_idx(large, s) for s in small]
        current = np.unique(np.concatenate(parts))
        if len(current) > cap:
            raise ResourceError(f"subgroup closure exceeds cap of {cap} elements", cost=len(current), budget=cap)
    current.setflags(write=False)
    if len(_closure_cache) < 4096:
        _closure_cache[key] = current
    return current


def _cyclic(group: GroupSpec, g: int) -> np.ndarray:
    coords = group.coords(g)
    order = 1
    for r, m in zip(coords, group.moduli):
        order = np.lcm(order, m // np.gcd(int(r), m))
    return np.unique(group.scale_idx(np.int64(g), np.arange(order)))


def enumerate_subgroup(g: GroupSpec, s: SubgroupSpec, cap: int = DEFAULT_SUBGROUP_CAP) -> set[GroupElement]:
    if s.group != g:
        raise StructuralError("subgroup generators do not belong to the group")
    return {g.element_of(i) for i in s.indices(cap)}


def index_of(g: GroupSpec, e: GroupElement) -> int:
    return g.index_of(e)


def element_of(g: GroupSpec, index: int) -> GroupElement:
    return g.element_of(index)
