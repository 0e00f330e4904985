"""Empirical scans for the qualitative Bessel inequality, plus the min-norm counterexample.

For a family (Q_i) and each eps the scan records

    lhs = E_{i,j} ||f||_{U^{2d-1}_{eps Q_i + eps Q_j}}   (all ordered pairs, diagonal included)
    rhs = E_i     ||f||_{U^d_{Q_i}}

The rate function c(eps) is not computable, so nothing is asserted about it;
the (eps, lhs, rhs) curve is the deliverable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import ArgumentError, GowersLabError, StructuralError
from .funcspace import FunctionTable, coset_labels
from .gowers import DEFAULT_BUDGET, box_norm
from .group import GroupSpec, SubgroupSpec
from .progression import CosetProgression, dilate, progression_sum


def _entry_seed(seed, *key) -> int:
    return int(np.random.SeedSequence([int(seed), *[int(k) for k in key]]).generate_state(1, np.uint64)[0])


def _norm_entry(f, qs, budget, samples, seed):
    try:
        r = box_norm(f, qs, budget=budget, samples=samples, seed=seed)
        return {"value": r.value, "method": r.method, "std_error": r.std_error, "samples": r.samples}
    except GowersLabError as exc:
        return {"value": None, "method": None, "std_error": None, "samples": 0, "error": str(exc)}


def _mean(entries):
    vals = [e["value"] for e in entries if e["value"] is not None]
    return float(np.mean(vals)) if vals else None


@dataclass
class BesselReport:
    eps: float
    lhs: float | None
    rhs: float | None
    pairs: list = field(default_factory=list)
    singles: list = field(default_factory=list)
    hypothesis_holds: bool | None = None
    incomplete: bool = False
    notes: list = field(default_factory=list)

    def recompute(self) -> tuple:
        return _mean(self.pairs), _mean(self.singles)

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "hypothesis_holds": self.hypothesis_holds,
            "incomplete": self.incomplete,
            "notes": self.notes,
            "pairs": self.pairs,
            "singles": self.singles,
        }


def bessel_scan(
    f: FunctionTable,
    progressions: list,
    d: int,
    eps_list,
    norm_budget: float = DEFAULT_BUDGET,
    seed: int = 0,
    samples: int | None = 20_000,
    box: bool = False,
    threads: int = 1,
) -> list[BesselReport]:
    """Scan eps over ``eps_list``.

    With ``box=True`` each family member is a list (Q_{i,1}, ..., Q_{i,d}) and
    the scan uses box norms over the grid (eps Q_{i,k} + eps Q_{j,l}).
    Norms beyond ``norm_budget`` fall back to Monte-Carlo (if ``samples``),
    otherwise the entry carries an error and the report is marked incomplete.
    """
    if d < 1:
        raise ArgumentError("d must be >= 1")
    if not progressions:
        raise ArgumentError("need a non-empty family of progressions")
    fam = [list(q) if box else [q] for q in progressions]
    for qs in fam:
        if box and len(qs) != d:
            raise ArgumentError("box scans need d progressions per family member")
        for q in qs:
            if q.group != f.group:
                raise StructuralError("progression lives in a different group")
    n = len(fam)

    def single(i):
        qs = fam[i] if box else fam[i] * d
        return _norm_entry(f, qs, norm_budget, samples, _entry_seed(seed, 0, i))

    singles = _rng.map_ordered(single, range(n), threads)
    for i, e in enumerate(singles):
        e["i"] = i
    rhs = _mean(singles)

    reports = []
    for ei, eps in enumerate(eps_list):
        if eps <= 0:
            raise ArgumentError("eps must be positive")

        def pair(ij):
            i, j = ij
            if box:
                qs = [progression_sum(dilate(a, eps), dilate(b, eps)) for a in fam[i] for b in fam[j]]
            else:
                qs = [progression_sum(dilate(fam[i][0], eps), dilate(fam[j][0], eps))] * (2 * d - 1)
            return _norm_entry(f, qs, norm_budget, samples, _entry_seed(seed, 1, ei, i, j))

        # (i, j) and (j, i) give the same multiset: evaluate i <= j and mirror
        upper = [(i, j) for i in range(n) for j in range(i, n)]
        vals = dict(zip(upper, _rng.map_ordered(pair, upper, threads)))
        pairs = []
        for i in range(n):
            for j in range(n):
                e = dict(vals[(min(i, j), max(i, j))])
                e["i"], e["j"] = i, j
                pairs.append(e)
        lhs = _mean(pairs)
        incomplete = any(e["value"] is None for e in pairs + singles)
        rep = BesselReport(float(eps), lhs, rhs, pairs, [dict(s) for s in singles], None, incomplete)
        if lhs is not None:
            rep.hypothesis_holds = lhs <= eps
            if not rep.hypothesis_holds:
                rep.notes.append("hypothesis lhs <= eps not satisfied; the inequality is vacuous at this eps")
        reports.append(rep)
    return reports


def diagonal_lower_bound(report: BesselReport) -> float | None:
    """(1/|I|) * min_i of the diagonal entries, a lower bound for ``lhs``."""
    diag = [e["value"] for e in report.pairs if e["i"] == e["j"] and e["value"] is not None]
    if not diag:
        return None
    n = len(report.singles)
    return min(diag) / n


def random_rank1_family(group: GroupSpec, count: int, length: float, seed: int) -> list[CosetProgression]:
    """``count`` rank-one progressions with random nonzero steps and bound ``length``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        step = int(rng.integers(1, group.order))
        out.append(CosetProgression.arithmetic(group, group.element_of(step), length))
    return out


def to_tsv(reports: list[BesselReport]) -> str:
    rows = ["eps\tlhs\trhs"]
    for r in sorted(reports, key=lambda r: r.eps):
        rows.append(f"{r.eps!r}\t{r.lhs!r}\t{r.rhs!r}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------


@dataclass
class CounterexamplePair:
    f: FunctionTable
    f1: FunctionTable
    f2: FunctionTable


def _invariant_random(group: GroupSpec, h: SubgroupSpec, seed: int, min_index: int) -> FunctionTable:
    labels = coset_labels(group, h)
    reps, inv = np.unique(labels, return_inverse=True)
    if len(reps) < min_index:
        raise ArgumentError(f"subgroup has index {len(reps)} < {min_index}; nothing to randomise")
    key = np.frombuffer(h.indices().tobytes(), dtype=np.uint32)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), *key[:4096].tolist(), len(key)]))
    signs = rng.choice([-1.0, 1.0], size=len(reps))
    if np.all(signs == signs[0]):
        signs[0] = -signs[0]
    return FunctionTable(group, signs[inv])


def counterexample_pair(group: GroupSpec, q1: SubgroupSpec, q2: SubgroupSpec, seed: int, min_index: int = 4):
    """``f = f1 + f2``: f1 is Q1-invariant with random +-1 values across Q1-cosets, f2 likewise for Q2.

    The randomness of each piece is keyed on (seed, its subgroup), so swapping
    q1 and q2 swaps f1 and f2 exactly.
    """
    if q1.group != group or q2.group != group:
        raise StructuralError("subgroups must live in the given group")
    f1 = _invariant_random(group, q1, seed, min_index)
    f2 = _invariant_random(group, q2, seed, min_index)
    return CounterexamplePair(f1 + f2, f1, f2)


def counterexample_report(
    pair: CounterexamplePair,
    q1: SubgroupSpec,
    q2: SubgroupSpec,
    d1: int,
    d2: int,
    eps: float = 0.5,
    budget: float = DEFAULT_BUDGET,
    samples: int = 20_000,
    seed: int = 0,
) -> dict:
    P1, P2 = CosetProgression.from_subgroup(q1), CosetProgression.from_subgroup(q2)
    joint = progression_sum(dilate(P1, eps), dilate(P2, eps))
    out = {}
    for name, fn in (("f1", pair.f1), ("f2", pair.f2)):
        out[f"{name}_U{d1}_Q1"] = box_norm(fn, [P1] * d1, budget=budget).value
        out[f"{name}_U{d2}_Q2"] = box_norm(fn, [P2] * d2, budget=budget).value
    big = box_norm(pair.f * 0.5, [joint] * (d1 + d2 - 1), budget=budget, samples=samples, seed=seed)
    out[f"f_half_U{d1 + d2 - 1}_joint"] = big.value
    out["joint_method"] = big.method
    out["joint_std_error"] = big.std_error
    return out
