"""Complex functions on a finite group with the uniform probability measure."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArgumentError, ResourceError, StructuralError
from .group import GroupSpec, SubgroupSpec, as_element

RTOL = 1e-9
ATOL = 1e-12
SIEVE_CAP = 5 * 10**8


class FunctionTable:
    """Dense table of complex values, flat-indexed by ``GroupSpec`` mixed radix.

    Tables are treated as immutable; every operation returns a new one.
    """

    __slots__ = ("group", "values")

    def __init__(self, group: GroupSpec, values):
        vals = np.asarray(values)
        if vals.dtype.kind not in "biufc":
            raise ArgumentError("function values must be numeric")
        vals = vals.astype(complex).reshape(-1)
        if vals.shape[0] != group.order:
            raise StructuralError(f"table has {vals.shape[0]} values, group order is {group.order}")
        if not np.all(np.isfinite(vals)):
            raise ArgumentError("function values must be finite")
        vals.setflags(write=False)
        self.group = group
        self.values = vals

    # constructors -----------------------------------------------------------

    @classmethod
    def constant(cls, group: GroupSpec, c=1.0) -> "FunctionTable":
        return cls(group, np.full(group.order, c, dtype=complex))

    @classmethod
    def from_function(cls, group: GroupSpec, fn) -> "FunctionTable":
        return cls(group, [fn(e) for e in group.elements()])

    @classmethod
    def character(cls, group: GroupSpec, xi) -> "FunctionTable":
        """``chi_xi(x) = exp(2 pi i sum_j xi_j x_j / N_j)``."""
        xi = as_element(group, xi)
        coords = group.coords(np.arange(group.order))
        phase = sum(coords[:, j] * xi.residues[j] / m for j, m in enumerate(group.moduli))
        return cls(group, np.exp(2j * np.pi * np.asarray(phase, dtype=float)))

    @classmethod
    def delta(cls, group: GroupSpec, at) -> "FunctionTable":
        v = np.zeros(group.order, dtype=complex)
        v[as_element(group, at).index] = 1
        return cls(group, v)

    @classmethod
    def random_pm1(cls, group: GroupSpec, rng: np.random.Generator) -> "FunctionTable":
        return cls(group, rng.choice([-1.0, 1.0], size=group.order))

    @classmethod
    def random_complex(cls, group: GroupSpec, rng: np.random.Generator) -> "FunctionTable":
        return cls(group, rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order))

    @classmethod
    def random_phase(cls, group: GroupSpec, rng: np.random.Generator) -> "FunctionTable":
        return cls(group, np.exp(2j * np.pi * rng.random(group.order)))

    @classmethod
    def quadratic_phase(cls, n: int, a: int = 1) -> "FunctionTable":
        """``e(a x^2 / n)`` on Z/n."""
        x = np.arange(n, dtype=np.int64)
        return cls(GroupSpec.cyclic(n), np.exp(2j * np.pi * ((a * x * x) % n) / n))

    # array views --------------------------------------------------------

    @property
    def nd(self) -> np.ndarray:
        return self.values.reshape(self.group.shape)

    def __call__(self, e) -> complex:
        return complex(self.values[as_element(self.group, e).index])

    def _same(self, other: "FunctionTable"):
        if not isinstance(other, FunctionTable) or other.group != self.group:
            raise StructuralError("functions live on different groups")

    def __add__(self, other):
        if isinstance(other, FunctionTable):
            self._same(other)
            return FunctionTable(self.group, self.values + other.values)
        return FunctionTable(self.group, self.values + other)

    def __sub__(self, other):
        if isinstance(other, FunctionTable):
            self._same(other)
            return FunctionTable(self.group, self.values - other.values)
        return FunctionTable(self.group, self.values - other)

    def __mul__(self, other):
        if isinstance(other, FunctionTable):
            self._same(other)
            return FunctionTable(self.group, self.values * other.values)
        return FunctionTable(self.group, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return FunctionTable(self.group, -self.values)

    def conj(self) -> "FunctionTable":
        return FunctionTable(self.group, self.values.conj())

    def allclose(self, other: "FunctionTable", rtol=RTOL, atol=ATOL) -> bool:
        self._same(other)
        return bool(np.allclose(self.values, other.values, rtol=rtol, atol=atol))

    def lp_norm(self, p=2) -> float:
        a = np.abs(self.values)
        if p == np.inf:
            return float(a.max())
        return float(np.mean(a**p) ** (1.0 / p))

    @property
    def sup_norm(self) -> float:
        return self.lp_norm(np.inf)

    def __repr__(self):
        return f"FunctionTable({self.group!r}, n={self.group.order})"

    # serialisation ------------------------------------------------------

    def save(self, path) -> None:
        """Little-endian f64 interleaved (re, im) plus ``<path>.json`` sidecar."""
        path = Path(path)
        raw = np.empty(2 * self.group.order, dtype="<f8")
        raw[0::2] = self.values.real
        raw[1::2] = self.values.imag
        _atomic_write(path, raw.tobytes())
        meta = {"group": list(self.group.moduli), "length": self.group.order}
        _atomic_write(path.with_name(path.name + ".json"), json.dumps(meta).encode())

    @classmethod
    def load(cls, path) -> "FunctionTable":
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".json").read_text())
        raw = np.frombuffer(path.read_bytes(), dtype="<f8")
        if len(raw) != 2 * meta["length"]:
            raise StructuralError(f"{path}: expected {meta['length']} complex values, found {len(raw) / 2}")
        return cls(GroupSpec(meta["group"]), raw[0::2] + 1j * raw[1::2])

    def to_csv(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re", "im"])
            for i, v in enumerate(self.values):
                w.writerow([i, repr(float(v.real)), repr(float(v.imag))])
        os.replace(tmp, path)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _axes(g: GroupSpec):
    return tuple(range(g.rank))


def shift_values(group: GroupSpec, values: np.ndarray, g_idx: int) -> np.ndarray:
    """Values of ``x -> f(x - g)`` for a flat (or batched flat) value array."""
    lead = values.shape[:-1]
    nd = values.reshape(lead + group.shape)
    axes = tuple(len(lead) + a for a in _axes(group))
    return np.roll(nd, tuple(int(c) for c in group.coords(g_idx)), axis=axes).reshape(values.shape)


def shift(f: FunctionTable, g) -> FunctionTable:
    """``T^g f = f(. - g)``."""
    g = as_element(f.group, g)
    return FunctionTable(f.group, shift_values(f.group, f.values, g.index))


def delta(f: FunctionTable, h, h2) -> FunctionTable:
    """``(T^h f) * conj(T^h2 f)``."""
    return shift(f, h) * shift(f, h2).conj()


def mean(f: FunctionTable) -> complex:
    return complex(f.values.mean())


def inner(f: FunctionTable, g: FunctionTable) -> complex:
    """``<f, g> = E_x f(x) conj(g(x))``."""
    f._same(g)
    return complex(np.vdot(g.values, f.values) / f.group.order)


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients ``fhat(xi) = E_x f(x) conj(chi_xi(x))``, flat-indexed by xi."""

    group: GroupSpec
    coefficients: np.ndarray

    def __call__(self, xi) -> complex:
        return complex(self.coefficients[as_element(self.group, xi).index])

    def l1(self) -> float:
        return float(np.abs(self.coefficients).sum())

    def l2_squared(self) -> float:
        return float((np.abs(self.coefficients) ** 2).sum())


def dft(f: FunctionTable) -> Spectrum:
    # numpy's pocketfft is exact-length for every modulus (Bluestein for large prime factors)
    coeffs = np.fft.fftn(f.nd, axes=_axes(f.group)).reshape(-1) / f.group.order
    return Spectrum(f.group, coeffs)


def idft(s: Spectrum) -> FunctionTable:
    nd = s.coefficients.reshape(s.group.shape)
    return FunctionTable(s.group, np.fft.ifftn(nd, axes=_axes(s.group)).reshape(-1) * s.group.order)


def autocorrelation_values(group: GroupSpec, values: np.ndarray) -> np.ndarray:
    """``A(delta) = E_x v(x) conj(v(x - delta))`` for every delta, via FFT.

    Accepts a batch of flat value arrays (leading axes preserved).
    """
    lead = values.shape[:-1]
    axes = tuple(len(lead) + a for a in _axes(group))
    fv = np.fft.fftn(values.reshape(lead + group.shape), axes=axes)
    ac = np.fft.ifftn(fv * fv.conj(), axes=axes) / group.order
    return ac.reshape(values.shape)


def coset_labels(group: GroupSpec, h: SubgroupSpec) -> np.ndarray:
    """Label each element by the smallest index in its H-coset."""
    if h.group != group:
        raise StructuralError("subgroup of a different group")
    members = h.indices()
    allx = np.arange(group.order)
    label = np.full(group.order, group.order, dtype=np.int64)
    for a in members:
        np.minimum.at(label, group.add_idx(allx, a), allx)
    return label


def invariant_projection(f: FunctionTable, h: SubgroupSpec) -> FunctionTable:
    """Conditional expectation onto H-invariant functions: coset averages."""
    labels = coset_labels(f.group, h)
    _, inv, counts = np.unique(labels, return_inverse=True, return_counts=True)
    sums = np.zeros(len(counts), dtype=complex)
    np.add.at(sums, inv, f.values)
    return FunctionTable(f.group, (sums / counts)[inv])


def mobius_values(n: int) -> np.ndarray:
    """``mu(0..n)`` by a linear sieve (``mu[0]`` is set to 0)."""
    if n < 0:
        raise ArgumentError("sieve length must be non-negative")
    if n > SIEVE_CAP:
        raise ResourceError(f"sieve up to {n} exceeds cap {SIEVE_CAP}", cost=n, budget=SIEVE_CAP)
    mu = np.zeros(n + 1, dtype=np.int8)
    if n >= 1:
        mu[1] = 1
    lp = np.zeros(n + 1, dtype=np.int64)
    primes: list[int] = []
    for i in range(2, n + 1):
        if lp[i] == 0:
            lp[i] = i
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if p > lp[i] or ip > n:
                break
            lp[ip] = p
            mu[ip] = 0 if p == lp[i] else -mu[i]
    return mu


def mobius_table(n: int, embed_factor: int = 5) -> FunctionTable:
    """mu on [1, n] embedded in Z/(embed_factor * n), zero elsewhere."""
    if n < 1 or embed_factor < 1:
        raise ArgumentError("need n >= 1 and embed_factor >= 1")
    size = embed_factor * n
    vals = np.zeros(size)
    mu = mobius_values(n)
    vals[1 : n + 1] = mu[1:]
    if size <= n:  # embed_factor == 1: x = n wraps onto 0
        vals[0] = mu[n]
    return FunctionTable(GroupSpec.cyclic(size), vals)
