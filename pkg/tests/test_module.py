import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import ideal_module
from posetmod.field import QQ, Field
from posetmod.generators import random_findet, random_module, random_poset
from posetmod.module import (CommutativityError, EncodedModule, FinDetModule, ModuleMorphism, associated_faces,
                             cokernel, coprimary_test, direct_sum, grid_poset, identity_morphism, image, kernel,
                             pullback, pushforward, restrict_to_image, verify_isomorphism)
from posetmod.lattice import FinDetRegion
from posetmod.primary import region_module
from posetmod.poset import FinitePoset, PosetMorphism, embed_into_grid, transitive_closure


def square(scale):
    return FinDetModule((0, 0), (1, 1), [1, 1, 1, 1],
                        {((0, 0), 0): [[1]], ((0, 0), 1): [[1]], ((0, 1), 0): [[scale]], ((1, 0), 1): [[1]]})


def test_commutativity_violation_has_a_diamond_witness():
    square(1)
    with pytest.raises(CommutativityError) as e:
        square(2)
    assert e.value.witness == ((0, 0), (1, 0), (0, 1), (1, 1))


def test_clamp_semantics():
    m = ideal_module([(1, 0), (0, 1)], (-1, -1), (2, 2))
    assert m.dim_at((-5, 7)) == 0 and m.dim_at((9, 0)) == 1 and m.dim_at((0, 0)) == 0
    assert QQ.equal(m.map_between((1, 0), (5, 5)), QQ.eye(1))
    big = m.enlarge(2)
    assert big.dim_at((4, 4)) == 1 and (big.resample(m.lo, m.hi).dim_array() == m.dim_array()).all()


def test_transitions_compose():
    m = random_findet(2, 4, 3)
    q, r, s = (0, 0), (1, 2), (3, 3)
    assert QQ.equal(m.map_between(q, s), QQ.matmul(m.map_between(r, s), m.map_between(q, r)))


@given(st.integers(0, 10 ** 6))
def test_kernel_image_cokernel_are_exact(seed):
    a = random_findet(2, 4, seed)
    b = random_findet(2, 4, seed + 1)
    s, inj, proj = direct_sum(a, b)
    phi = proj[0]
    k, inc = kernel(phi)
    c, pr = cokernel(phi)
    im, onto, into = image(phi)
    for i in range(len(s.poset)):
        assert k.dims[i] + im.dims[i] == s.dims[i]
        assert im.dims[i] + c.dims[i] == a.dims[i]
        assert QQ.is_zero(QQ.matmul(phi.comps[i], inc.comps[i]))
    assert inc.is_injective() and onto.is_surjective() and into.is_injective() and pr.is_surjective()
    inc.check(), pr.check(), onto.check(), into.check()


@given(st.integers(0, 10 ** 6))
def test_pullback_along_identity_and_composites(seed):
    p = random_poset(6, seed, 0.4)
    m = random_module(p, seed)
    ident = PosetMorphism(p, p, tuple(range(len(p))))
    assert pullback(m, ident).same_as(m)
    point = FinitePoset.chain(1)
    const = pullback(EncodedModule(point, [2], {}), PosetMorphism(p, point, (0,) * len(p)))
    assert all(d == 2 for d in const.dims) and all(QQ.equal(x, QQ.eye(2)) for x in const.maps.values())


@given(st.integers(0, 10 ** 6))
def test_pushforward_restricts_back(seed):
    p = random_poset(6, seed, 0.35)
    h = random_module(p, seed)
    _, coords = embed_into_grid(p)
    pushed = pushforward(coords, h)
    back = restrict_to_image(pushed, coords, p)
    ident = ModuleMorphism(back, h, [QQ.eye(d) for d in h.dims], check=True)
    assert verify_isomorphism(ident)


def test_pushforward_fills_with_colimits():
    # two incomparable points: at their join the colimit is the direct sum
    p = FinitePoset.antichain(["a", "b"])
    h = EncodedModule(p, [1, 1], {})
    pushed = pushforward([[1, 0], [0, 1]], h, (-1, -1), (2, 2))
    assert pushed.dim_at((1, 1)) == 2 and pushed.dim_at((1, 0)) == 1 and pushed.dim_at((0, 0)) == 0


def test_associated_faces_of_monomial_quotients():
    lo, hi = (-1, -1), (4, 4)
    # k[x,y]/<x^2, y^3> has finite length: only the bounded face
    artinian = region_module(FinDetRegion.from_predicate(lo, hi, lambda q: 0 <= q[0] < 2 and 0 <= q[1] < 3), QQ)
    assert associated_faces(artinian) == [()] and coprimary_test(artinian, ())
    strip = region_module(FinDetRegion.from_predicate(lo, hi, lambda q: q[1] <= 1, "downset"), QQ)
    assert associated_faces(strip) == [(0,)]
    assert coprimary_test(strip, (0,)) and not coprimary_test(strip, ())
    assert associated_faces(ideal_module([(0, 0)], lo, hi)) == [(0, 1)]


def test_identity_and_sums_over_a_prime_field():
    f = Field(3)
    p = transitive_closure(range(3), [(0, 1), (0, 2)])
    m = EncodedModule(p, [1, 1, 1], {(0, 1): [[2]], (0, 2): [[1]]}, f)
    assert verify_isomorphism(identity_morphism(m))
    s, inj, proj = direct_sum(m, m)
    assert s.dims == (2, 2, 2) and all(x.is_injective() for x in inj)
    assert m.maps[(0, 1)][0, 0] == 2


def test_grid_poset_is_cached():
    assert grid_poset((0, 0), (2, 3)) is grid_poset((0, 0), (2, 3))
    assert np.array(grid_poset((0,), (3,)).elements).shape == (4, 1)
