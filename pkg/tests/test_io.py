import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import data
from posetmod import io
from posetmod.field import QQ, Field
from posetmod.fringe import fringe_presentation, materialize
from posetmod.generators import (random_encoded, random_filtration, random_findet, random_fringe_data,
                                 random_module, random_poset, random_upset)
from posetmod.homalg import MonomialMatrix
from posetmod.lattice import FinDetRegion, FlatLabel, InjLabel
from posetmod.module import CommutativityError, FinDetModule, ModuleMorphism

seeds = st.integers(0, 10 ** 6)


def through_text(d):
    return json.loads(io.dumps(d))


@given(seeds)
def test_poset_round_trip(seed):
    p = random_poset(7, seed)
    assert io.poset_from_json(through_text(io.poset_to_json(p))) == p


@given(seeds)
def test_region_round_trip(seed):
    p = random_poset(7, seed)
    u = random_upset(p, seed)
    back = io.region_from_json(through_text(io.region_to_json(u, with_poset=True)))
    assert back.poset == p and list(back.mask) == list(u.mask) and back.kind == "upset"


@given(seeds, st.sampled_from(["upset", "downset", "set"]))
def test_box_region_round_trip(seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "set":
        mask = rng.random((4, 3)) < 0.5
    else:
        pts = rng.integers(0, 4, size=(2, 2))
        fn = (lambda q: any(q[0] >= a and q[1] >= b for a, b in pts)) if kind == "upset" else \
            (lambda q: any(q[0] <= a and q[1] <= b for a, b in pts))
        mask = np.array([[fn((x, y)) for y in range(3)] for x in range(4)])
    r = FinDetRegion((0, 0), (3, 2), mask, kind)
    d = through_text(io.box_region_to_json(r))
    assert sum(d["cells"]) == 12
    assert io.box_region_from_json(d) == r


@given(seeds, st.sampled_from([0, 5]))
def test_module_round_trip(seed, p):
    f = Field(p)
    m = random_module(random_poset(6, seed), seed, f=f)
    back = io.module_from_json(through_text(io.module_to_json(m)))
    assert back.field == f and back.same_as(m)


@given(seeds)
def test_box_module_round_trip(seed):
    m = random_findet(2, 4, seed)
    back = io.module_from_json(through_text(io.module_to_json(m)))
    assert isinstance(back, FinDetModule) and (back.lo, back.hi) == (m.lo, m.hi) and back.same_as(m)


@given(seeds)
def test_morphism_round_trip(seed):
    m = random_findet(2, 3, seed)
    ident = ModuleMorphism(m, m, [QQ(2) * QQ.eye(d) for d in m.dims])
    back = io.morphism_from_json(through_text(io.morphism_to_json(ident)))
    assert all(QQ.equal(a, b) for a, b in zip(back.comps, ident.comps))


def test_monomial_matrix_round_trip():
    rows = [FlatLabel((0, 1), ()), FlatLabel((2, 0), (1,))]
    cols = [InjLabel((3, 3), (0,))]
    mm = MonomialMatrix(rows, cols, QQ.mat([["1/2"], [-3]], (2, 1)), QQ)
    back = io.monomial_matrix_from_json(through_text(io.monomial_matrix_to_json(mm)))
    assert back.rows == rows and back.cols == cols and QQ.equal(back.entries, mm.entries)


@given(seeds)
def test_fringe_round_trip_finite(seed):
    p = random_poset(6, seed)
    ups, downs, ent = random_fringe_data(p, seed)
    from posetmod.fringe import MonomialMatrixFringe
    phi = MonomialMatrixFringe(ups, downs, ent, QQ)
    back = io.fringe_from_json(through_text(io.fringe_to_json(phi)))
    assert [list(r.mask) for r in back.rows] == [list(r.mask) for r in ups]
    assert [list(r.mask) for r in back.cols] == [list(r.mask) for r in downs]
    assert QQ.equal(back.entries, ent)


def test_fringe_round_trip_box():
    m = random_findet(2, 4, 11)
    phi = fringe_presentation(m)
    d = through_text(io.fringe_to_json(phi))
    assert "carrier" not in d and all("cells" in r for r in d["rows"] + d["cols"])
    back = io.fringe_from_json(d)
    assert QQ.equal(back.entries, phi.entries)
    assert materialize(back.rows, back.cols, back.entries, QQ).target.poset == m.poset


@given(seeds)
def test_filtration_round_trip(seed):
    fil = random_filtration(seed, vertices=5, max_simplices=12)
    back = io.filtration_from_json(through_text(io.filtration_to_json(fil)))
    assert back.simplices == fil.simplices


@given(seeds)
def test_encoding_round_trip(seed):
    m, pi, h = random_encoded(seed)
    from posetmod.encoding import Encoding
    enc = Encoding(pi, h, ModuleMorphism(m, m, [QQ.eye(d) for d in m.dims]))
    back = io.encoding_from_json(through_text(io.encoding_to_json(enc)))
    assert back.pi.images == pi.images and back.H.same_as(h) and back.verify()


def test_scalars_are_exact_strings():
    m = FinDetModule((0,), (1,), [1, 1], {(0, 1): QQ.mat([["2/3"]], (1, 1))})
    d = io.module_to_json(m)
    assert d["maps"] == {"0->1": [["2/3"]]} and d["dims"] == {"0": 1, "1": 1}


def test_dumps_keeps_scalar_lists_inline():
    text = io.dumps({"a": [1, 2, 3], "b": [[1, 2], [3]]})
    assert '"a": [1, 2, 3]' in text and "[1, 2]" in text


@pytest.mark.parametrize("doc, loc", [
    ({"box": {"lo": [0], "hi": [1]}, "dims": {"0": 1, "1": 1}, "maps": {"0->1": [["x"]]}}, '$.maps["0->1"]'),
    ({"box": {"lo": [0], "hi": [1]}, "dims": {"0": 1, "7": 1}}, '$.dims["7"]'),
    ({"box": {"lo": [0], "hi": [2]}, "dims": {"0": 1, "2": 1}, "maps": {"0->2": [["1"]]}}, '$.maps["0->2"]'),
    ({"box": {"lo": [0], "hi": [1]}, "dims": {"0": 1, "1": 1}}, "$.maps"),
    ({"box": {"lo": [0], "hi": [1]}, "dims": {"0": -1}}, '$.dims["0"]'),
    ({"dims": {}}, "$"),
])
def test_format_errors_have_locations(doc, loc):
    with pytest.raises(io.FormatError) as exc:
        io.module_from_json(doc)
    assert exc.value.location == loc


def test_noncommuting_fixture_rejected():
    with pytest.raises(CommutativityError) as exc:
        io.module_from_json(io.load_path(data("noncommuting.json")))
    assert exc.value.witness == ((0, 0), (1, 0), (0, 1), (1, 1))


def test_bad_text_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 2,\n "simplices": [}')
    with pytest.raises(io.FormatError) as exc:
        io.load_path(str(p))
    assert exc.value.location == f"{p}:2:16"


def test_box_runs_must_cover_box():
    with pytest.raises(io.FormatError) as exc:
        io.box_region_from_json({"lo": [0, 0], "hi": [1, 1], "cells": [1, 2]})
    assert exc.value.location == "$.cells"
