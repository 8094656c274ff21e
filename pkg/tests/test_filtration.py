import itertools

import pytest
import sympy
from hypothesis import given, strategies as st

from helpers import data, sympy_rank
from posetmod import io
from posetmod.field import QQ, Field
from posetmod.filtration import (FiltrationError, MultiFiltration, check_filtration, homology_dims,
                                 natural_encoding, persistent_homology, validate)
from posetmod.generators import random_filtration


def two_vertex():
    return io.filtration_from_json(io.load_path(data("two_vertex.json")))


def boundary_oracle(fil, k, sub, p=0):
    """∂_k on the subcomplex, built from vertex lists with sympy entries."""
    simp = [fil.simplices[i].vertices for i in sorted(sub)]
    ks = [s for s in simp if len(s) == k + 1]
    km = [s for s in simp if len(s) == k]
    m = sympy.zeros(len(km), len(ks))
    if k == 0:
        return m, ks
    for c, s in enumerate(ks):
        for t in range(len(s)):
            m[km.index(s[:t] + s[t + 1:]), c] = (-1) ** t
    return m, ks


def rank_oracle(fil, k, x, y):
    """rank of H_k(X) -> H_k(Y) as rank[B_Y | Z_X] - rank B_Y, over QQ."""
    dx, cx = boundary_oracle(fil, k, x)
    _, cy = boundary_oracle(fil, k, y)
    up, _ = boundary_oracle(fil, k + 1, y)
    z = dx.nullspace() if cx and dx.rows else [sympy.eye(len(cx))[:, c] for c in range(len(cx))]
    if not cy:
        return 0
    zy = sympy.zeros(len(cy), len(z))
    for c, v in enumerate(z):
        for a, s in enumerate(cx):
            zy[cy.index(s), c] = v[a]
    b = up if up.cols else sympy.zeros(len(cy), 0)
    rb = b.rank() if b.cols else 0
    both = b.row_join(zy) if b.cols else zy
    return (both.rank() if both.cols else 0) - rb


def check_rank_invariant(fil, k):
    m = persistent_homology(fil, k)
    cells = m.poset.elements
    cache = {}
    for i, j in itertools.combinations_with_replacement(range(len(cells)), 2):
        if not m.poset.leq[i, j]:
            continue
        x, y = fil.subcomplex(cells[i]), fil.subcomplex(cells[j])
        if (x, y) not in cache:
            cache[(x, y)] = rank_oracle(fil, k, x, y)
        assert QQ.rank(m.transition(i, j)) == cache[(x, y)], (cells[i], cells[j])


def test_two_vertex_table():
    m = persistent_homology(two_vertex(), 0)
    assert (m.lo, m.hi) == ((-1, -1), (1, 1))
    grid = [[m.dims[m.cell((x, y))] for x in range(-1, 2)] for y in range(-1, 2)]
    assert grid == [[0, 0, 0], [0, 0, 1], [0, 1, 1]]
    enc = natural_encoding(two_vertex(), 0)
    assert len(enc.pi.target) == 4 and enc.verify()


def test_worked_example_dims():
    fil = io.filtration_from_json(io.load_path(data("worked_filtration.json")))
    assert homology_dims(fil, 0, (0, 0)) == 1
    assert homology_dims(fil, 0, (1, 1)) == 3
    assert homology_dims(fil, 0, (2, 2)) == 1
    assert homology_dims(fil, 1, (2, 2)) == 0
    check_rank_invariant(fil, 0)


def test_cycle_gives_h1():
    tri = MultiFiltration(2, [((0,), [(0, 0)]), ((1,), [(0, 0)]), ((2,), [(0, 0)]),
                              ((0, 1), [(0, 0)]), ((1, 2), [(0, 0)]), ((0, 2), [(1, 0)]),
                              ((0, 1, 2), [(1, 1)])])
    m = persistent_homology(tri, 1)
    assert m.dims[m.cell((1, 0))] == 1 and m.dims[m.cell((1, 1))] == 0 and m.dims[m.cell((0, 1))] == 0


def test_validate_reports_late_face():
    fil = MultiFiltration(2, [((0,), [(1, 1)]), ((1,), [(0, 0)]), ((0, 1), [(0, 1)])])
    assert validate(fil) == ((0, 1), (0,), (0, 1))
    with pytest.raises(FiltrationError):
        check_filtration(fil)
    missing = MultiFiltration(1, [((0,), [(0,)]), ((0, 1), [(1,)])])
    assert validate(missing) == ((0, 1), (1,), (1,))


def test_empty_complex_is_zero():
    m = persistent_homology(MultiFiltration(2, []), 0)
    assert m.is_zero()


def test_duplicate_simplex_rejected():
    with pytest.raises(ValueError):
        MultiFiltration(1, [((0,), [(0,)]), ((0,), [(1,)])])


@given(st.integers(0, 10 ** 6))
def test_rank_invariant_against_oracle(seed):
    fil = random_filtration(seed, vertices=5, max_simplices=14, max_deg=3)
    check_filtration(fil)
    for k in (0, 1):
        check_rank_invariant(fil, k)


@given(st.integers(0, 10 ** 6))
def test_prime_field_dims(seed):
    fil = random_filtration(seed, vertices=5, max_simplices=14, max_deg=3)
    f = Field(3)
    m = persistent_homology(fil, 1, f)
    for q in m.poset.elements:
        sub = fil.subcomplex(q)
        d1, c1 = boundary_oracle(fil, 1, sub)
        d2, _ = boundary_oracle(fil, 2, sub)
        r1 = sympy_rank(d1.tolist(), 3) if d1.cols and d1.rows else 0
        r2 = sympy_rank(d2.tolist(), 3) if d2.cols and d2.rows else 0
        assert m.dims[m.cell(q)] == len(c1) - r1 - r2


def test_encoding_pullback_matches_module():
    fil = random_filtration(3, vertices=5, max_simplices=12)
    enc = natural_encoding(fil, 0)
    assert enc.verify()
    m = enc.witness.target
    assert all(m.dims[i] == enc.H.dims[enc.pi.images[i]] for i in range(len(m.dims)))
