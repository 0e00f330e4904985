import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gowerslab.errors import ArgumentError, ResourceError, StructuralError
from gowerslab.group import GroupSpec, SubgroupSpec, add, element_of, enumerate_subgroup, index_of, neg

from conftest import brute_closure


def test_add_cyclic():
    g = GroupSpec.cyclic(5)
    assert add(g.element(3), g.element(4)) == g.element(2)


def test_add_identity():
    g = GroupSpec((3, 4, 5))
    for e in g.elements():
        assert e + g.zero == e


def test_add_componentwise():
    g = GroupSpec((2, 2))
    assert g.element(1, 1) + g.element(1, 0) == g.element(0, 1)


def test_add_dimension_mismatch():
    a = GroupSpec((2, 2)).element(1, 1)
    b = GroupSpec((2, 3)).element(1, 1)
    with pytest.raises(StructuralError):
        add(a, b)


def test_residues_reduced():
    g = GroupSpec((4, 6))
    assert g.element(-1, 13).residues == (3, 1)


@pytest.mark.parametrize("moduli", [(0,), (3, -1)])
def test_bad_moduli(moduli):
    with pytest.raises(ArgumentError):
        GroupSpec(moduli)


def test_trivial_group():
    g = GroupSpec(())
    assert g.order == 1 and list(g.elements()) == [g.zero]


def test_enumerate_cyclic_subgroup():
    g = GroupSpec.cyclic(6)
    s = SubgroupSpec(g, [2])
    assert enumerate_subgroup(g, s) == {g.element(0), g.element(2), g.element(4)}


def test_enumerate_trivial():
    g = GroupSpec((4, 6))
    assert enumerate_subgroup(g, SubgroupSpec(g, [])) == {g.zero}


def test_enumerate_klein_in_z4_squared():
    g = GroupSpec((4, 4))
    s = SubgroupSpec(g, [(2, 0), (0, 2)])
    got = enumerate_subgroup(g, s)
    assert len(got) == 4
    assert got == brute_closure(g, [g.element(2, 0), g.element(0, 2)])


@pytest.mark.parametrize("moduli", [(12,), (4, 6), (2, 3, 4), (8, 8)])
def test_closure_matches_brute_force(moduli):
    rng = np.random.default_rng(sum(moduli))
    g = GroupSpec(moduli)
    for _ in range(10):
        gens = [g.element_of(int(i)) for i in rng.integers(0, g.order, rng.integers(0, 3))]
        got = enumerate_subgroup(g, SubgroupSpec(g, gens))
        assert got == brute_closure(g, gens)
        assert g.order % len(got) == 0
        for a in got:
            assert -a in got
            for b in got:
                assert a + b in got


def test_closure_cap():
    g = GroupSpec.cyclic(1000)
    with pytest.raises(ResourceError):
        SubgroupSpec(g, [1]).indices(cap=100)


def test_index_of_examples():
    assert index_of(GroupSpec.cyclic(5), GroupSpec.cyclic(5).element(3)) == 3
    g = GroupSpec((3, 4))
    assert index_of(g, g.element(1, 2)) == 6


@pytest.mark.parametrize("moduli", [(10_000,), (10, 10, 10), (7, 11, 13), (2, 2, 2, 2, 3)])
def test_index_bijection(moduli):
    g = GroupSpec(moduli)
    seen = set()
    for i in range(g.order):
        e = element_of(g, i)
        assert index_of(g, e) == i
        seen.add(e.residues)
    assert len(seen) == g.order


def test_index_matches_numpy_layout():
    g = GroupSpec((3, 4, 5))
    for i, c in enumerate(itertools.product(range(3), range(4), range(5))):
        assert np.ravel_multi_index(c, g.shape) == i == g.element(*c).index


moduli_st = st.lists(st.integers(1, 9), min_size=1, max_size=3)


@settings(max_examples=100, deadline=None)
@given(moduli_st, st.data())
def test_group_axioms(moduli, data):
    g = GroupSpec(moduli)
    idx = st.integers(0, g.order - 1)
    a, b, c = (g.element_of(data.draw(idx)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert neg(neg(a)) == a
    assert a + (-a) == g.zero
    assert a - b == a + (-b)


@settings(max_examples=50, deadline=None)
@given(moduli_st, st.data())
def test_vectorised_ops_agree(moduli, data):
    g = GroupSpec(moduli)
    i = data.draw(st.integers(0, g.order - 1))
    j = data.draw(st.integers(0, g.order - 1))
    a, b = g.element_of(i), g.element_of(j)
    assert int(g.add_idx(i, j)) == (a + b).index
    assert int(g.sub_idx(i, j)) == (a - b).index
    assert int(g.neg_idx(i)) == (-a).index
    assert int(g.scale_idx(i, 7)) == (7 * a).index
