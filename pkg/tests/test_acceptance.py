"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time
from importlib import resources

import numpy as np

from gowerslab import cli
from gowerslab.dualnorm import dual_norm_lower_bound, dual_norm_oracle_tiny
from gowerslab.funcspace import FunctionTable, dft, inner, invariant_projection, shift
from gowerslab.gowers import box_norm_exact, box_norm_mc, dual_function, gowers_inner_product, uniformity_norm
from gowerslab.group import GroupSpec, SubgroupSpec
from gowerslab.patterns import local_norm_chain, mobius_experiment, pattern_average
from gowerslab.polyrank import (
    PolyFunction,
    concat_property_test,
    degree_check,
    examples_lowrank,
    monomial,
    random_bidegree_poly,
    rank_check,
    verify_witness,
)
from gowerslab.progression import CosetProgression

BASE = json.loads(resources.files("gowerslab").joinpath("data/baselines.json").read_text())
TOL = 1e-9


def test_c01_fourier_oracle(criterion):
    rng = np.random.default_rng(1)
    worst = 0.0
    t0 = time.perf_counter()
    for N in (16, 64, 256, 101):
        g = GroupSpec.cyclic(N)
        whole = SubgroupSpec.whole(g)
        for _ in range(50):
            f = FunctionTable.random_complex(g, rng)
            want = (np.abs(dft(f).coefficients) ** 4).sum() ** 0.25
            err = abs(uniformity_norm(f, whole, 2).value - want) / max(1, f.lp_norm(2))
            worst = max(worst, err)
    dt = time.perf_counter() - t0
    ok = worst <= TOL and dt < 30
    assert criterion(1, ok, f"max scaled error {worst:.2e}, {dt:.2f}s")


def test_c02_dual_identity(criterion):
    rng = np.random.default_rng(2)
    g = GroupSpec.cyclic(32)
    worst = 0.0
    for _ in range(20):
        q = CosetProgression.arithmetic(g, int(rng.integers(1, 32)), int(rng.integers(1, 6)))
        f = FunctionTable.random_complex(g, rng)
        lhs = inner(f, dual_function([f] * 3, [q, q]))
        rhs = box_norm_exact(f, [q, q]).base_power_mean
        worst = max(worst, abs(lhs - rhs))
    assert criterion(2, worst <= TOL, f"max |<f,D^2 f> - ||f||^4| = {worst:.2e}")


def test_c03_mean_ergodic(criterion):
    rng = np.random.default_rng(3)
    g = GroupSpec.cyclic(12)
    worst = 0.0
    for gen in (0, 1, 2, 3, 4, 6):  # one generator per subgroup of Z/12
        h = SubgroupSpec(g, [gen])
        for _ in range(10):
            f = FunctionTable.random_complex(g, rng)
            diff = dual_function([f], [h]).values - invariant_projection(f, h).values
            worst = max(worst, float(np.abs(diff).max()))
    assert criterion(3, worst <= 1e-12, f"max |D^1_H f - P_H f| = {worst:.2e} over 6 subgroups")


def _rand_q(g, rng):
    return CosetProgression.arithmetic(g, g.element_of(int(rng.integers(g.order))), int(rng.integers(0, 4)))


def test_c04_inequalities(criterion):
    rng = np.random.default_rng(4)
    g = GroupSpec((3, 5))
    bad = dict.fromkeys(("csg", "mono", "shift", "modulation", "permutation", "triangle"), 0)
    for _ in range(200):
        d = int(rng.integers(1, 3))
        qs = [_rand_q(g, rng) for _ in range(d)]
        fs = [FunctionTable.random_complex(g, rng) for _ in range(2**d)]
        bound = math.prod(box_norm_exact(f, qs).value for f in fs)
        bad["csg"] += abs(gowers_inner_product(fs, qs)) > bound + TOL

        qs3 = [_rand_q(g, rng) for _ in range(3)]
        f = fs[0]
        n = [box_norm_exact(f, qs3[:k]).value for k in (1, 2, 3)]
        bad["mono"] += n[0] > n[1] + TOL or n[1] > n[2] + TOL

        x = g.element_of(int(rng.integers(g.order)))
        bad["shift"] += abs(box_norm_exact(shift(f, x), qs3).value - n[2]) > TOL

        chi = FunctionTable.character(g, g.element_of(int(rng.integers(g.order))))
        q2 = qs3[:2]
        bad["modulation"] += abs(box_norm_exact(chi * f, q2).value - n[1]) > TOL

        perm = [qs3[i] for i in rng.permutation(3)]
        bad["permutation"] += abs(box_norm_exact(f, perm, reorder=False).value - n[2]) > TOL

        u = fs[1]
        bad["triangle"] += box_norm_exact(f + u, qs3).value > n[2] + box_norm_exact(u, qs3).value + TOL
    total = sum(bad.values())
    assert criterion(4, total == 0, "200 trials each; violations " + ", ".join(f"{k}={v}" for k, v in bad.items()))


def test_c05_polynomial_concatenation(criterion):
    t0 = time.perf_counter()
    pairs = [(a, b) for a in (1, 2, 3) for b in (1, 2, 3) if a + b <= 5]
    per = -(-200 // len(pairs))
    trials = violations = hyp = 0
    for k, (d1, d2) in enumerate(pairs):
        n = min(per, 200 - trials)
        rep = concat_property_test({"kind": "polynomial", "p": 5, "d1": d1, "d2": d2}, n, seed=500 + k)
        trials += rep["trials"]
        violations += rep["violations"]
        hyp += rep["hypothesis_failures"]
    P, h1, h2 = monomial(5, 2, 2)
    sharp = degree_check(P, h1 + h2, 2)
    sharp_ok = (not sharp.verdict) and verify_witness(P, sharp) and bool(degree_check(P, h1 + h2, 3))
    dt = time.perf_counter() - t0
    ok = trials == 200 and violations == 0 and hyp == 0 and sharp_ok and dt < 60
    assert criterion(
        5,
        ok,
        f"{trials} instances, {violations} violations, monomial sharpness {'fails as expected' if sharp_ok else 'WRONG'}, {dt:.1f}s",
    )


def test_c06_low_rank_concatenation(criterion):
    rng = np.random.default_rng(6)
    examples_ok = all(bool(rank_check(P, hs)) for P, hs in examples_lowrank(5, rng))
    trials = violations = hyp = 0
    for k, (d1, d2) in enumerate([(1, 1), (1, 2), (2, 1), (2, 2)]):
        rep = concat_property_test({"kind": "rank", "p": 3, "d1": d1, "d2": d2}, 25, seed=600 + k)
        trials += rep["trials"]
        violations += rep["violations"]
        hyp += rep["hypothesis_failures"]
    ok = examples_ok and trials == 100 and violations == 0 and hyp == 0
    assert criterion(
        6, ok, f"examples {'pass' if examples_ok else 'FAIL'}; {trials} product-rank instances, {violations} violations"
    )


def test_c07_mode_cross_validation(criterion):
    rng = np.random.default_rng(7)
    disagree = 0
    checked = 0
    g3 = GroupSpec((3, 3))
    g33 = GroupSpec((3, 3, 3))
    for t in range(100):
        kind = t % 4
        if kind == 0:  # structured, usually passes
            P, h1, h2 = random_bidegree_poly(rng, 5, int(rng.integers(1, 3)), int(rng.integers(1, 3)))
            d = int(rng.integers(1, 4))
            a, b = (degree_check(P, h1 + h2, d, m) for m in ("difference", "recursive"))
        elif kind == 1:  # random values on (Z/5)^2 = 625 >= |G|
            P = PolyFunction(GroupSpec((5, 5)), rng.integers(0, 5, 25))
            h = SubgroupSpec(P.domain, [P.domain.element_of(int(rng.integers(25)))])
            d = int(rng.integers(1, 4))
            a, b = (degree_check(P, h, d, m) for m in ("difference", "recursive"))
        elif kind == 2:
            P = PolyFunction(g3, rng.integers(0, 3, 9), 3)
            hs = [SubgroupSpec(g3, [g3.element_of(int(rng.integers(9)))]) for _ in range(int(rng.integers(1, 4)))]
            a, b = (rank_check(P, hs, m) for m in ("difference", "recursive"))
        else:
            P, hs = examples_lowrank(3, rng)[1]
            if rng.random() < 0.5:
                P = P + PolyFunction(g33, rng.integers(0, 3, 27) * (rng.random(27) < 0.1), 3)
            a, b = (rank_check(P, hs, m) for m in ("difference", "recursive"))
        checked += 1
        disagree += a.verdict != b.verdict
    assert criterion(7, disagree == 0, f"{checked} instances, {disagree} disagreements")


def test_c08_mc_calibration(criterion):
    rng = np.random.default_rng(8)
    g = GroupSpec.cyclic(64)
    q = SubgroupSpec.whole(g)
    hits = 0
    for k in range(20):
        f = FunctionTable.random_complex(g, rng)
        ex = box_norm_exact(f, [q, q]).base_power_mean
        mc = box_norm_mc(f, [q, q], samples=100_000, seed=800 + k)
        hits += abs(mc.base_power_mean - ex) <= 4 * mc.std_error
    assert criterion(8, hits >= 19, f"{hits}/20 within 4 standard errors")


def test_c09_dual_norm_oracle(criterion):
    rng = np.random.default_rng(9)
    g = GroupSpec.cyclic(4)
    q = CosetProgression.arithmetic(g, 1, 4)
    good = feasible = 0
    worst = math.inf
    for k in range(20):
        f = FunctionTable.random_complex(g, rng)
        o = dual_norm_oracle_tiny(f, q, 2, 0.5, phase_levels=8)
        w = dual_norm_lower_bound(f, q, 2, 0.5, seed=900 + k)
        ratio = w.inner / o.inner if o.inner > 0 else math.inf
        worst = min(worst, ratio)
        good += ratio >= 0.9
        # re-verify the witness from scratch
        qe = CosetProgression(q.subgroup, q.generators, [0.5 * b for b in q.bounds])
        feasible += w.g.sup_norm <= 1 + TOL and uniformity_norm(w.g, qe, 2).value <= 0.5 + TOL
    ok = good == 20 and feasible == 20
    assert criterion(9, ok, f"{good}/20 at >= 0.9 x oracle (worst ratio {worst:.3f}), {feasible}/20 witnesses feasible")


def test_c10_pattern_exactness(criterion):
    rng = np.random.default_rng(10)
    g = GroupSpec.cyclic(256)
    one = FunctionTable.constant(g)
    ones_ok = pattern_average(one, one, one, one, 16).value == 1
    worst_char = 0.0
    for slot in range(4):
        fs = [one] * 4
        fs[slot] = FunctionTable.character(g, 1)
        worst_char = max(worst_char, abs(pattern_average(*fs, 16).value))
    fs = [FunctionTable.random_complex(g, rng) for _ in range(4)]
    ex = pattern_average(*fs, 16).value
    mc = pattern_average(*fs, 16, method="monte_carlo", samples=200_000, seed=10)
    mc_ok = abs(mc.value - ex) <= 4 * mc.std_error
    ok = ones_ok and worst_char <= 1e-12 and mc_ok
    assert criterion(
        10,
        ok,
        f"A(1,1,1,1)==1: {ones_ok}; max character case {worst_char:.1e}; MC gap {abs(mc.value - ex):.2e} vs 4se {4 * mc.std_error:.2e}",
    )


def test_c11_mobius(criterion):
    cfg = BASE["mobius_exact"]
    ex = mobius_experiment(cfg["N"], cfg["M"], cfg["embed_factor"], method="exact")
    exact_ok = (ex.numerator, ex.denominator) == (cfg["numerator"], cfg["denominator"])
    mc = mobius_experiment(10**5, samples=10**6, seed=11, method="monte_carlo")
    thr = max(0.02, 4 * mc.std_error)
    mc_ok = abs(mc.value) <= thr
    assert criterion(
        11,
        exact_ok and mc_ok,
        f"N=1000 exact {ex.numerator}/{ex.denominator} (baseline match {exact_ok}); N=1e5 MC |{abs(mc.value):.4f}| <= {thr:.4f}",
    )


def test_c12_local_norm_trend(criterion):
    cfg = BASE["local_u2_chain"]
    N, M, kappa = cfg["N"], cfg["M"], cfg["kappa"]
    g = GroupSpec.cyclic(N)
    quad = local_norm_chain(FunctionTable.quadratic_phase(N, cfg["quadratic_a"]), M, kappa).average
    rnd_f = FunctionTable.random_pm1(g, np.random.default_rng(cfg["random_test_seed"]))
    rnd = local_norm_chain(rnd_f, M, kappa).average
    ok = quad >= cfg["quadratic_min"] and rnd <= cfg["random_max"]
    assert criterion(12, ok, f"quadratic {quad:.4f} >= {cfg['quadratic_min']}, random {rnd:.4f} <= {cfg['random_max']}")


ACCEPTANCE_CONFIGS = {
    "norm_mc": {
        "command": "norm",
        "group": [64],
        "input": {"generator": "random_complex"},
        "d": 2,
        "method": "monte_carlo",
        "samples": 20000,
    },
    "bessel": {
        "command": "bessel",
        "group": [64],
        "input": {"generator": "random_pm1"},
        "random_family": {"count": 3, "length": 6},
        "d": 2,
        "eps_list": [0.5, 1.0],
        "samples": 2000,
        "budget": 1e5,
    },
    "pattern_mc": {
        "command": "pattern",
        "group": [256],
        "input": {"generator": "random_phase"},
        "M": 16,
        "method": "monte_carlo",
        "samples": 50000,
    },
    "mobius_mc": {"command": "mobius", "N": 10000, "method": "monte_carlo", "samples": 100000},
    "dualnorm": {
        "command": "dualnorm",
        "group": [8],
        "input": {"generator": "random_complex"},
        "d": 2,
        "eps": 0.5,
        "candidates": 64,
    },
    "concat": {"command": "concat", "kind": "polynomial", "d1": 2, "d2": 2, "trials": 10},
}


def test_c13_determinism(tmp_path, criterion):
    mismatched = []
    for name, cfg in ACCEPTANCE_CONFIGS.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(cfg))
        outs = []
        for threads in (1, 3, 8):
            out = tmp_path / f"{name}-{threads}"
            code = cli.main(
                [cfg["command"], "--config", str(path), "--seed", "13", "--threads", str(threads), "--out", str(out)]
            )
            assert code == 0
            outs.append((out / "result.json").read_bytes())
        if len(set(outs)) != 1:
            mismatched.append(name)
    assert criterion(
        13, not mismatched, f"{len(ACCEPTANCE_CONFIGS)} configs x threads (1,3,8); mismatches {mismatched or 'none'}"
    )
