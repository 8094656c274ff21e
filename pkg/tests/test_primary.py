import pytest
from hypothesis import given, strategies as st

from posetmod.field import QQ
from posetmod.generators import random_downset_box, random_findet, random_short_exact
from posetmod.lattice import FinDetRegion, all_faces, canonical_primary_decomposition_downset
from posetmod.module import coprimary_test, image, kernel
from posetmod.primary import (associated_faces, associated_faces_scan, global_support, local_support, localize,
                              localize_morphism, primary_decomposition, region_module, same_submodule,
                              support_morphism)

LO, HI = (-2, -2), (5, 5)


def strip_union_module():
    d = FinDetRegion.from_predicate(LO, HI, lambda q: q[1] <= 1 or (q[0] <= 0 and q[1] <= 3), "downset")
    return region_module(d, QQ)


def test_strip_union_components():
    m = strip_union_module()
    dec = primary_decomposition(m)
    assert dec.faces == [(), (0,)] and dec.is_injective()
    assert [c.quotient.total_dim for c in dec.components] == [18, 32]
    assert associated_faces_scan(m) == [(), (0,)]


def test_bounded_part_plus_two_strips():
    d = FinDetRegion.from_predicate(LO, HI, lambda q: q[1] <= 0 or q[0] <= 0 or (q[0] <= 2 and q[1] <= 2),
                                    "downset")
    dec = primary_decomposition(region_module(d, QQ))
    assert dec.faces == [(), (0,), (1,)]


def test_global_support_sizes():
    m = strip_union_module()
    assert {tau: global_support(m, tau)[0].total_dim for tau in all_faces(2)} == {
        (): 6, (0,): 38, (1,): 6, (0, 1): 38}


def test_zero_module_has_no_components():
    m = region_module(FinDetRegion.empty((0, 0), (2, 2), "downset"), QQ)
    assert primary_decomposition(m).components == [] and associated_faces(m) == []


def test_face_sweep_is_capped():
    m = random_findet(1, 3, 0)
    with pytest.raises(ValueError):
        primary_decomposition(m, max_dim=0)


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_downset_modules_decompose(seed, n):
    d = random_downset_box(n, 5 if n == 2 else 4, seed, 3)
    m = region_module(d, QQ)
    if m.is_zero():
        return
    dec = primary_decomposition(m)
    assert dec.is_injective()
    assert dec.faces == [tau for tau, _ in canonical_primary_decomposition_downset(d)]
    for c in dec.components:
        assert [t for t in all_faces(n) if coprimary_test(c.quotient, t)] == [c.tau]


@given(st.integers(0, 10 ** 6))
def test_module_faces_agree_with_the_scan(seed):
    m = random_findet(2, 5, seed)
    if m.is_zero():
        return
    dec = primary_decomposition(m)
    assert dec.is_injective() and dec.faces == associated_faces_scan(m)
    pruned = primary_decomposition(m, prune=True)
    assert pruned.is_injective() and set(pruned.faces) <= set(dec.faces)


@given(st.integers(0, 10 ** 6))
def test_support_is_left_exact(seed):
    a, b, c, inc, proj = random_short_exact(2, 4, seed)
    for tau in all_faces(2):
        ga, gb, gc = global_support(a, tau), global_support(b, tau), global_support(c, tau)
        gi = support_morphism(inc, tau, ga, gb)
        gp = support_morphism(proj, tau, gb, gc)
        assert gi.is_injective()
        _, kin = kernel(gp)
        _, _, into = image(gi)
        assert same_submodule(QQ, kin, into)


@given(st.integers(0, 10 ** 6))
def test_support_commutes_with_localization(seed):
    m = random_findet(2, 4, seed)
    for tau in all_faces(2):
        loc, _ = localize(m, tau)
        for tau2 in all_faces(2):
            g, incl = global_support(m, tau2)
            lg = localize_morphism(incl, tau, target=loc)
            _, incl2 = global_support(loc, tau2)
            assert same_submodule(QQ, lg, incl2)
            if not set(tau) <= set(tau2):
                assert localize(g, tau)[0].is_zero()


def test_local_support_of_a_strip():
    strip = region_module(FinDetRegion.from_predicate(LO, HI, lambda q: q[1] <= 1, "downset"), QQ)
    assert local_support(strip, (0,))[0].total_dim > 0
    assert local_support(strip, ())[0].is_zero() and local_support(strip, (1,))[0].is_zero()
