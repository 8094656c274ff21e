import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from posetmod.generators import random_downset_box
from posetmod.lattice import (FinDetRegion, FlatLabel, InjLabel, all_faces, canonical_primary_decomposition_downset,
                              flat_meets_inj, global_support_downset, localize_downset, meeting_degree)

LO, HI = (-2, -2), (5, 5)


def strip_union():
    # {b <= 1} union {a <= 0, b <= 3}
    return FinDetRegion.from_predicate(LO, HI, lambda q: q[1] <= 1 or (q[0] <= 0 and q[1] <= 3), "downset")


def _localize_oracle(d, tau):
    """q + N^tau inside D, walking each tau coordinate one step past the box."""
    out = np.zeros(d.shape, dtype=bool)
    for idx in itertools.product(*[range(s) for s in d.shape]):
        q = tuple(a + i for a, i in zip(d.lo, idx))
        ranges = [range(q[k], d.hi[k] + 2) if k in tau else [q[k]] for k in range(d.n)]
        out[idx] = all(p in d for p in itertools.product(*ranges))
    return out


def _global_support_oracle(d, tau):
    out = np.zeros(d.shape, dtype=bool)
    for idx in itertools.product(*[range(s) for s in d.shape]):
        q = tuple(a + i for a, i in zip(d.lo, idx))
        if q not in d:
            continue
        dies = True
        for k in range(d.n):
            if k in tau:
                continue
            walk = [tuple(q[j] + (t if j == k else 0) for j in range(d.n)) for t in range(d.hi[k] - q[k] + 2)]
            dies &= not all(p in d for p in walk)
        out[idx] = dies
    return out


def test_region_algebra_and_closure():
    a = FinDetRegion.from_predicate((0, 0), (2, 2), lambda q: q == (1, 1))
    assert len(a.down_closure().cells()) == 4 and len(a.up_closure().cells()) == 4
    b = a.resample((-1, -1), (3, 3))
    assert (1, 1) in b and (0, 0) not in b
    assert (a | a.complement()).mask.all() and not (a & a.complement()).mask.any()
    with pytest.raises(ValueError):
        FinDetRegion.from_predicate((0, 0), (2, 2), lambda q: q == (1, 1), "downset")


def test_labels_and_duals():
    f = FlatLabel((1, 2), (1,))
    assert f.b == (1, 0) and (1, -9) in f and (0, 5) not in f
    e = f.dual()
    assert isinstance(e, InjLabel) and e.b == (-1, 0) and e.dual() == f
    assert flat_meets_inj(FlatLabel((1, 1), ()), InjLabel((0, 3), (0,)))
    assert not flat_meets_inj(FlatLabel((1, 1), ()), InjLabel((3, 0), ()))
    assert meeting_degree(FlatLabel((1, 1), ()), InjLabel((2, 2), ()), (0, 0), (3, 3)) == (1, 1)


def test_strip_union_decomposition():
    parts = dict(canonical_primary_decomposition_downset(strip_union()))
    assert sorted(parts) == [(), (0,)]
    assert parts[(0,)] == FinDetRegion.from_predicate(LO, HI, lambda q: q[1] <= 1, "downset")
    assert parts[()] == FinDetRegion.from_predicate(LO, HI, lambda q: q[0] <= 0 and q[1] <= 3, "downset")


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_localization_and_support_match_oracles(seed, n):
    d = random_downset_box(n, 4, seed, 3)
    for tau in all_faces(n):
        assert (localize_downset(d, tau).mask == _localize_oracle(d, tau)).all()
        assert (global_support_downset(d, tau).mask == _global_support_oracle(d, tau)).all()


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_primary_components_cover_the_downset(seed, n):
    d = random_downset_box(n, 5 if n == 2 else 4, seed, 3)
    parts = canonical_primary_decomposition_downset(d)
    union = np.zeros(d.shape, dtype=bool)
    for tau, p in parts:
        assert p.kind == "downset" and p.issubset(d)
        # a τ-primary component has local support only along τ
        assert [t for t, _ in canonical_primary_decomposition_downset(p)] == [tau]
        union |= p.mask
    assert (union == d.mask).all()
