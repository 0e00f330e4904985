"""Regenerate src/gowerslab/data/baselines.json.

The thresholds used by the acceptance suite are derived here from pilot runs
with fixed seeds; rerunning this script must reproduce the file byte for byte.
"""

import json
import math
from pathlib import Path

import numpy as np

from gowerslab import bessel, patterns
from gowerslab.funcspace import FunctionTable
from gowerslab.group import GroupSpec

OUT = Path(__file__).resolve().parents[1] / "src" / "gowerslab" / "data" / "baselines.json"


def floor2(x):
    return math.floor(x * 100) / 100


def ceil2(x):
    return math.ceil(x * 100) / 100


def mobius():
    r = patterns.mobius_experiment(1000, method="exact")
    sq = patterns.mobius_experiment(1000, method="exact", square=True)
    return {
        "N": 1000,
        "M": r.M,
        "embed_factor": 5,
        "numerator": r.numerator,
        "denominator": r.denominator,
        "value": r.value.real,
        "square_numerator": sq.numerator,
    }


def local_chain(pilot_seeds=range(8), test_seed=0):
    N, M, kappa = 1009, 31, 0.5
    g = GroupSpec.cyclic(N)
    quad = patterns.local_norm_chain(FunctionTable.quadratic_phase(N, 1), M, kappa).average
    rand = {}
    for s in pilot_seeds:
        f = FunctionTable.random_pm1(g, np.random.default_rng(s))
        rand[str(s)] = patterns.local_norm_chain(f, M, kappa).average
    return {
        "N": N,
        "M": M,
        "kappa": kappa,
        "quadratic_a": 1,
        "quadratic_pilot": quad,
        "random_pilot": rand,
        "random_test_seed": test_seed,
        "quadratic_min": floor2(quad),
        "random_max": ceil2(max(rand.values())),
    }


def bessel_rhs(f_seed=0, family_seed=1):
    N, count, length = 4096, 8, 64
    g = GroupSpec.cyclic(N)
    f = FunctionTable.random_pm1(g, np.random.default_rng(f_seed))
    fam = bessel.random_rank1_family(g, count, length, family_seed)
    from gowerslab.gowers import uniformity_norm

    rhs = float(np.mean([uniformity_norm(f, q, 2).value for q in fam]))
    return {
        "N": N,
        "count": count,
        "length": length,
        "f_seed": f_seed,
        "family_seed": family_seed,
        "rhs_pilot": rhs,
        "rhs_max": ceil2(rhs),
    }


def main():
    data = {"mobius_exact": mobius(), "local_u2_chain": local_chain(), "bessel_random_rhs": bessel_rhs()}
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()
