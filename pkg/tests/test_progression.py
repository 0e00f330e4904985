import collections
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gowerslab.errors import ArgumentError, ResourceError, StructuralError
from gowerslab.group import GroupSpec, SubgroupSpec
from gowerslab.progression import (
    CosetProgression,
    IndexSpace,
    Multiset,
    dilate,
    dump_multiset,
    progression_sum,
    sample,
    sample_many,
    sumset,
)


def literal_enumeration(q: CosetProgression):
    """Counter over tuples (h, n_1, ..., n_r), straight from the definition."""
    g = q.group
    hs = sorted(SubgroupSpec(g, q.subgroup.generators).indices())
    ranges = [range(-math.floor(b), math.floor(b) + 1) for b in q.bounds]
    out = collections.Counter()
    for h in hs:
        for ns in itertools.product(*ranges):
            e = g.element_of(int(h))
            for n, v in zip(ns, q.generators):
                e = e + n * v
            out[e.index] += 1
    return out


def as_counter(m: Multiset):
    return collections.Counter({int(i): int(c) for i, c in zip(m.indices, m.mults)})


def test_sumset_worked_instance():
    g = GroupSpec.cyclic(7)
    a = Multiset.from_elements(g, [1, 2])
    s = a + a
    assert as_counter(s) == collections.Counter({2: 1, 3: 2, 4: 1})
    assert s.total == 4


def test_sumset_zero_identity(rng):
    g = GroupSpec((5, 6))
    a = Multiset(g, rng.integers(0, g.order, 12))
    assert a + Multiset.from_elements(g, [g.zero]) == a


def test_sumset_totals(rng):
    g = GroupSpec.cyclic(31)
    for _ in range(50):
        a = Multiset(g, rng.integers(0, 31, rng.integers(1, 11)))
        b = Multiset(g, rng.integers(0, 31, rng.integers(1, 11)))
        assert (a + b).total == a.total * b.total
        assert (a - b).total == a.total * b.total
        brute = collections.Counter()
        for u, mu in zip(a.indices, a.mults):
            for v, mv in zip(b.indices, b.mults):
                brute[int((u + v) % 31)] += int(mu * mv)
        assert as_counter(a + b) == brute


def test_sumset_overflow():
    g = GroupSpec.cyclic(3)
    big = Multiset(g, [0], [2**40])
    with pytest.raises(ResourceError):
        sumset(big, big)


def test_multiset_rejects_empty():
    with pytest.raises(ArgumentError):
        Multiset(GroupSpec.cyclic(3), [])


def test_multiset_json_roundtrip(rng):
    g = GroupSpec((4, 5))
    m = Multiset(g, rng.integers(0, 20, 15))
    data = json.loads(dump_multiset(m))
    assert [d["element"] for d in data] == sorted(d["element"] for d in data)
    assert Multiset.from_json(g, data) == m


def test_dilate_identity():
    g = GroupSpec.cyclic(100)
    q = CosetProgression.arithmetic(g, 1, 10)
    assert dilate(q, 1) == q


def test_dilate_floor():
    g = GroupSpec.cyclic(100)
    q = dilate(CosetProgression.arithmetic(g, 1, 10), 0.25)
    assert q.bounds == (2.5,)
    assert q.index_space.radii == (2,)
    assert sorted(q.index_space.elements().tolist()) == [0, 1, 2, 98, 99]


@pytest.mark.parametrize("eps", [0, -1.0])
def test_dilate_rejects_nonpositive(eps):
    with pytest.raises(ArgumentError):
        dilate(CosetProgression.arithmetic(GroupSpec.cyclic(5), 1, 2), eps)


def test_nested_dilates(rng):
    g = GroupSpec((101,))
    agree = 0
    for _ in range(50):
        q = CosetProgression.arithmetic(g, int(rng.integers(1, 101)), float(rng.uniform(0, 30)))
        a, b = rng.uniform(0.1, 2, 2)
        two = dilate(dilate(q, a), b)
        one = dilate(q, a * b)
        # equality is asserted only where the two floors coincide
        if math.floor(b * (a * q.bounds[0])) == math.floor((a * b) * q.bounds[0]):
            agree += 1
            assert two.index_space.same_as(one.index_space)
            assert literal_enumeration(two) == literal_enumeration(one)
    assert agree > 25


def test_dilate_keeps_rank_and_subgroup():
    g = GroupSpec((6, 10))
    q = CosetProgression(SubgroupSpec(g, [(3, 0)]), [(0, 1), (1, 1)], [3, 2])
    d = dilate(q, 0.4)
    assert d.rank == q.rank and d.subgroup == q.subgroup and d.generators == q.generators


def test_progression_sum_rank():
    g = GroupSpec.cyclic(50)
    q = CosetProgression.arithmetic(g, 2, 3) + CosetProgression.arithmetic(g, 5, 1)
    assert q.rank == 2


def test_progression_sum_trivial():
    g = GroupSpec.cyclic(50)
    q = CosetProgression.arithmetic(g, 7, 4)
    z = CosetProgression(SubgroupSpec.trivial(g))
    s = progression_sum(q, z)
    assert s.index_space.same_as(q.index_space)


def test_progression_sum_enumeration(rng):
    g = GroupSpec.cyclic(101)
    for _ in range(20):
        q1 = CosetProgression.arithmetic(g, int(rng.integers(0, 101)), int(rng.integers(0, 6)))
        q2 = CosetProgression.arithmetic(g, int(rng.integers(0, 101)), int(rng.integers(0, 6)))
        s = progression_sum(q1, q2)
        assert s.to_multiset() == q1.to_multiset() + q2.to_multiset()
        assert as_counter(s.to_multiset()) == literal_enumeration(s)


def test_progression_sum_with_subgroups():
    g = GroupSpec((6, 4))
    q1 = CosetProgression(SubgroupSpec(g, [(2, 0)]), [(1, 1)], [1])
    q2 = CosetProgression(SubgroupSpec(g, [(0, 2)]), [(1, 0)], [2])
    s = progression_sum(q1, q2)
    assert as_counter(s.to_multiset()) == literal_enumeration(s)
    # H1 and H2 meet only in 0, so H1 + H2 has multiplicity one and the sums agree exactly
    assert s.to_multiset() == q1.to_multiset() + q2.to_multiset()


def test_progression_sum_overlapping_subgroups():
    g = GroupSpec.cyclic(12)
    q1 = CosetProgression.from_subgroup(SubgroupSpec(g, [4]))
    q2 = CosetProgression.from_subgroup(SubgroupSpec(g, [6]))
    s = progression_sum(q1, q2)
    # H1 + H2 as a multiset doubles nothing here (H1 and H2 meet trivially) ...
    assert s.to_multiset() == q1.to_multiset() + q2.to_multiset()
    # ... but H + H counts each element |H| times while the progression counts it once
    h = CosetProgression.from_subgroup(SubgroupSpec(g, [4]))
    assert set((h.to_multiset() + h.to_multiset()).indices) == set(progression_sum(h, h).to_multiset().indices)
    assert progression_sum(h, h).to_multiset().total == 3


def test_progression_sum_group_mismatch():
    with pytest.raises(StructuralError):
        CosetProgression.arithmetic(GroupSpec.cyclic(5), 1, 1) + CosetProgression.arithmetic(GroupSpec.cyclic(6), 1, 1)


@pytest.mark.parametrize(
    "moduli,h,gens,bounds",
    [
        ((101,), [], [3], [4.7]),
        ((6, 10), [(3, 0)], [(0, 1), (1, 1)], [3, 2]),
        ((5, 5, 4), [(0, 0, 2)], [(1, 2, 0)], [6]),
        ((12,), [4], [], []),
        ((7, 9), [], [(1, 3), (2, 2), (0, 1)], [1, 1.5, 2]),
    ],
)
def test_index_space_matches_literal(moduli, h, gens, bounds):
    g = GroupSpec(moduli)
    q = CosetProgression(SubgroupSpec(g, h), gens, bounds)
    lit = literal_enumeration(q)
    space = q.index_space
    assert space.size == sum(lit.values())
    assert space.size == len(SubgroupSpec(g, h).indices()) * math.prod(2 * math.floor(b) + 1 for b in bounds)
    assert collections.Counter(space.elements().tolist()) == lit
    hist = space.histogram()
    assert {i: int(c) for i, c in enumerate(hist) if c} == dict(lit)


def test_config_roundtrip():
    g = GroupSpec((6, 10))
    q = CosetProgression(SubgroupSpec(g, [(3, 0)]), [(0, 1)], [2.5])
    assert CosetProgression.from_config(g, json.loads(json.dumps(q.to_config()))) == q


def test_bad_bounds():
    g = GroupSpec.cyclic(5)
    with pytest.raises(ArgumentError):
        CosetProgression.arithmetic(g, 1, -1)
    with pytest.raises(StructuralError):
        CosetProgression(SubgroupSpec.trivial(g), [1, 2], [1])


def test_sample_singleton():
    g = GroupSpec.cyclic(9)
    q = CosetProgression(SubgroupSpec.trivial(g), [4], [0])
    assert {sample(q.index_space, 3, i).index for i in range(50)} == {0}


def test_sample_uniform_over_tuples():
    g = GroupSpec.cyclic(7)
    q = CosetProgression.arithmetic(g, 1, 1)
    n = 100_000
    draws = sample_many(q.index_space, seed=11, n=n)
    p = 1 / 3
    sigma = math.sqrt(n * p * (1 - p))
    for v in (6, 0, 1):
        assert abs((draws == v).sum() - n * p) <= 4 * sigma
    assert set(np.unique(draws)) == {0, 1, 6}


def test_sample_deterministic_and_indexed():
    g = GroupSpec((5, 7))
    space = IndexSpace(CosetProgression(SubgroupSpec(g, [(1, 0)]), [(0, 1)], [2]))
    many = sample_many(space, seed=5, n=5000)
    assert np.array_equal(many, sample_many(space, seed=5, n=5000))
    for i in (0, 1, 4095, 4096, 4999):
        assert sample(space, 5, i).index == many[i]
    assert not np.array_equal(many, sample_many(space, seed=6, n=5000))


def test_sampled_average_with_multiplicity():
    g = GroupSpec.cyclic(11)
    m = Multiset.from_elements(g, [1, 2, 2])
    assert m.average(lambda e: e.residues[0]) == pytest.approx(5 / 3)
    draws = sample_many(m, seed=2, n=30_000)
    vals = draws.astype(float)
    se = vals.std() / math.sqrt(len(vals))
    assert abs(vals.mean() - 5 / 3) <= 3 * se


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 40),
    st.lists(st.tuples(st.integers(0, 39), st.floats(0, 4)), min_size=0, max_size=3),
    st.floats(0.05, 3),
)
def test_dilate_preserves_structure(n, parts, eps):
    g = GroupSpec.cyclic(n)
    q = CosetProgression(SubgroupSpec.trivial(g), [p[0] for p in parts], [p[1] for p in parts])
    d = dilate(q, eps)
    assert d.rank == q.rank
    assert d.subgroup == q.subgroup
    assert all(math.floor(x) == r for x, r in zip(d.bounds, d.index_space.radii))
    assert d.histogram().sum() == d.index_space.size
