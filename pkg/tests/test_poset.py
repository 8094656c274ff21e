import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from posetmod.generators import all_posets, random_downset, random_poset, random_upset
from posetmod.module import indicator_module
from posetmod.oracle import oracle_hom
from posetmod.poset import (CycleError, FinitePoset, PosetMorphism, embed_into_grid, hom_downset_downset,
                            hom_indicator, hom_upset_upset, pi0, transitive_closure, upset_generated,
                            downset_cogenerated)


def test_transitive_closure_and_covers():
    p = transitive_closure("abcd", [("a", "b"), ("b", "c"), ("a", "d")])
    assert p.le("a", "c") and not p.le("c", "a") and not p.le("d", "c")
    assert [(p.elements[i], p.elements[j]) for i, j in p.covers] == [("a", "b"), ("a", "d"), ("b", "c")]


def test_cycle_is_reported_with_a_witness():
    with pytest.raises(CycleError) as e:
        transitive_closure([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
    cyc = e.value.cycle
    assert cyc[0] == cyc[-1] and set(cyc) == {1, 2, 3}


def test_counts_of_small_posets():
    # unlabelled posets on 1..5 elements: 1, 2, 5, 16, 63
    assert [len(all_posets(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]


def test_grid_poset_covers():
    g = FinitePoset.grid((0, 0), (1, 2))
    assert len(g) == 6 and len(g.covers) == 7
    assert g.le((0, 1), (1, 2)) and not g.le((1, 0), (0, 2))


def test_regions_and_components():
    p = FinitePoset.antichain([0, 1, 2])
    u = upset_generated(p, [0, 2])
    assert u.members == [0, 2] and len(pi0(u)) == 2
    c = transitive_closure(range(3), [(0, 1), (1, 2)])
    d = downset_cogenerated(c, [1])
    assert d.members == [0, 1]
    with pytest.raises(ValueError):
        c.region([1], "upset")


def test_hom_on_the_square_ideal_example():
    # Hom(<x,y>, k[x,y]/m^2) on a grid: the overlap has two components
    g = FinitePoset.grid((0, 0), (2, 2))
    u = g.region([q for q in g.elements if q != (0, 0)], "upset")
    d = g.region([(0, 0), (1, 0), (0, 1)], "downset")
    assert len(hom_indicator(u, d)) == 2
    assert oracle_hom(indicator_module(u), indicator_module(d)) == 2


def test_hom_on_connected_poset_is_one():
    p = transitive_closure(range(4), [(0, 1), (0, 2), (1, 3), (2, 3)])
    full = p.region(p.elements, "upset")
    assert oracle_hom(indicator_module(full), indicator_module(full)) == 1


@given(st.integers(0, 10 ** 6))
def test_hom_formula_matches_oracle(seed):
    rng = random.Random(seed)
    p = random_poset(7, rng, 0.3)
    u, d = random_upset(p, rng), random_downset(p, rng)
    assert len(hom_indicator(u, d)) == oracle_hom(indicator_module(u), indicator_module(d))


@given(st.integers(0, 10 ** 6))
def test_upset_and_downset_homs_match_oracle(seed):
    rng = random.Random(seed)
    p = random_poset(6, rng, 0.35)
    u1, u2 = random_upset(p, rng), random_upset(p, rng)
    d1, d2 = random_downset(p, rng), random_downset(p, rng)
    assert len(hom_upset_upset(u1, u2)) == oracle_hom(indicator_module(u1), indicator_module(u2))
    assert len(hom_downset_downset(d1, d2)) == oracle_hom(indicator_module(d1), indicator_module(d2))


@given(st.integers(0, 10 ** 6))
def test_grid_embedding_is_an_order_embedding(seed):
    p = random_poset(7, seed, 0.35)
    n, coords = embed_into_grid(p)
    le = (coords[:, None, :] <= coords[None, :, :]).all(axis=2)
    assert coords.shape == (7, n) and (le == p.leq).all()


def test_morphism_must_preserve_order():
    c = FinitePoset.chain(2)
    with pytest.raises(ValueError):
        PosetMorphism(c, FinitePoset.antichain([0, 1]), (0, 1))
    m = PosetMorphism(c, FinitePoset.chain(1), (0, 0))
    assert m(1) == 0 and m.fiber(0) == [0, 1]


def test_relation_must_be_a_partial_order():
    with pytest.raises(ValueError):
        FinitePoset([0, 1], np.array([[1, 1], [0, 0]], dtype=bool))
