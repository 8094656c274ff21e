"""JSON formats for posets, regions, modules, morphisms, monomial matrices,
filtrations, encodings and decomposition reports.

Scalars are exact strings ("3/2", or residues mod p).  Element ids are
strings, integers, or integer tuples; tuples are written as JSON lists and,
when used as object keys, as comma-joined strings ("1,2").  A cover a < b is
keyed "a->b".  Box bitsets are run lengths alternating false/true, starting
with a (possibly zero) false run, over the cells in lexicographic order.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .field import QQ, Field
from .filtration import MultiFiltration
from .homalg import MonomialMatrix
from .lattice import FinDetRegion, FlatLabel, InjLabel
from .module import EncodedModule, FinDetModule, ModuleMorphism, grid_poset
from .poset import FinitePoset, PosetMorphism, PosetRegion, transitive_closure


class FormatError(ValueError):
    """Malformed input; ``location`` is a JSON path like ``$.maps["0->1"]``."""

    def __init__(self, location, msg):
        self.location = location
        super().__init__(f"{location}: {msg}")


# element ids


def id_to_json(e):
    return list(e) if isinstance(e, tuple) else e


def id_from_json(x):
    if isinstance(x, list):
        return tuple(int(v) for v in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise FormatError("$", f"bad element id {x!r}")


def key_of(e) -> str:
    return ",".join(str(v) for v in e) if isinstance(e, tuple) else str(e)


def _key_table(poset: FinitePoset, where: str) -> dict:
    table = {}
    for i, e in enumerate(poset.elements):
        k = key_of(e)
        if k in table:
            raise FormatError(where, f"element ids {poset.elements[table[k]]!r} and {e!r} share the key {k!r}")
        table[k] = i
    return table


def _lookup(table, key, where):
    if key not in table:
        raise FormatError(where, f"unknown element {key!r}")
    return table[key]


# scalars and matrices


def matrix_to_json(f: Field, a) -> list:
    return [[f.fmt(x) for x in row] for row in np.asarray(a)]


def matrix_from_json(f: Field, rows, shape, where) -> np.ndarray:
    try:
        if shape[0] == 0 or shape[1] == 0:
            return f.zeros(*shape)
        if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
            raise FormatError(where, f"expected a {shape[0]}x{shape[1]} matrix")
        return f.mat([[f(x) for x in r] for r in rows], shape)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(where, f"bad scalar ({exc})") from None


def field_from_json(d, default: Field = QQ) -> Field:
    name = d.get("field") if isinstance(d, dict) else None
    if name is None:
        return default
    try:
        return Field.from_name(name)
    except ValueError as exc:
        raise FormatError("$.field", str(exc)) from None


# posets and regions


def poset_to_json(p: FinitePoset) -> dict:
    return {"elements": [id_to_json(e) for e in p.elements],
            "covers": [[id_to_json(p.elements[a]), id_to_json(p.elements[b])] for a, b in p.covers]}


def poset_from_json(d, where="$") -> FinitePoset:
    if not isinstance(d, dict) or "elements" not in d:
        raise FormatError(where, "poset needs 'elements'")
    elements = [id_from_json(x) for x in d["elements"]]
    pairs = []
    ids = set(elements)
    for k, c in enumerate(d.get("covers", [])):
        if not isinstance(c, list) or len(c) != 2:
            raise FormatError(f"{where}.covers[{k}]", "expected a pair")
        a, b = id_from_json(c[0]), id_from_json(c[1])
        if a not in ids or b not in ids:
            raise FormatError(f"{where}.covers[{k}]", "unknown element")
        pairs.append((a, b))
    return transitive_closure(elements, pairs)


def box_region_to_json(r: FinDetRegion) -> dict:
    flat = r.flat_mask()
    runs, cur, count = [], False, 0
    for v in flat:
        if bool(v) == cur:
            count += 1
        else:
            runs.append(count)
            cur, count = not cur, 1
    runs.append(count)
    return {"n": len(r.lo), "lo": list(r.lo), "hi": list(r.hi), "kind": r.kind, "cells": runs}


def box_region_from_json(d, where="$") -> FinDetRegion:
    try:
        lo, hi = tuple(int(x) for x in d["lo"]), tuple(int(x) for x in d["hi"])
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        total = int(np.prod(shape))
        flat, cur = [], False
        for run in d["cells"]:
            flat.extend([cur] * int(run))
            cur = not cur
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(where, f"bad box region ({exc})") from None
    if len(flat) != total:
        raise FormatError(f"{where}.cells", f"runs cover {len(flat)} cells, box has {total}")
    if "n" in d and int(d["n"]) != len(lo):
        raise FormatError(f"{where}.n", "does not match the box")
    try:
        return FinDetRegion(lo, hi, np.array(flat, dtype=bool).reshape(shape), d.get("kind", "set"))
    except ValueError as exc:
        raise FormatError(where, str(exc)) from None


def region_to_json(r, with_poset: bool = False) -> dict:
    if isinstance(r, FinDetRegion):
        return box_region_to_json(r)
    out = {"kind": r.kind, "members": [id_to_json(e) for e in r.members]}
    if with_poset:
        out["poset"] = poset_to_json(r.poset)
    return out


def region_from_json(d, poset: FinitePoset = None, where="$"):
    """A PosetRegion (members list) or FinDetRegion (box bitset)."""
    if not isinstance(d, dict):
        raise FormatError(where, "region must be an object")
    if "cells" in d:
        return box_region_from_json(d, where)
    if "poset" in d:
        poset = poset_from_json(d["poset"], f"{where}.poset")
    if poset is None:
        raise FormatError(where, "region of a finite poset needs the poset")
    members = [id_from_json(x) for x in d.get("members", [])]
    bad = [e for e in members if e not in poset.index]
    if bad:
        raise FormatError(f"{where}.members", f"unknown element {bad[0]!r}")
    try:
        return poset.region(members, d.get("kind", "set"))
    except ValueError as exc:
        raise FormatError(where, str(exc)) from None


def box_region_as_poset_region(r: FinDetRegion) -> PosetRegion:
    return PosetRegion(grid_poset(r.lo, r.hi), r.flat_mask(), r.kind, check=False)


# modules and morphisms


def _carrier_to_json(m: EncodedModule) -> dict:
    if isinstance(m, FinDetModule):
        return {"box": {"lo": list(m.lo), "hi": list(m.hi)}}
    return {"poset": poset_to_json(m.poset)}


def module_to_json(m: EncodedModule) -> dict:
    p, f = m.poset, m.field
    out = {"field": f.name}
    out.update(_carrier_to_json(m))
    out["dims"] = {key_of(e): d for e, d in zip(p.elements, m.dims) if d}
    maps = {}
    for a, b in p.covers:
        if m.dims[a] and m.dims[b]:
            maps[f"{key_of(p.elements[a])}->{key_of(p.elements[b])}"] = matrix_to_json(f, m.maps[(a, b)])
    out["maps"] = maps
    return out


def _carrier_from_json(d, where):
    if "box" in d:
        b = d["box"]
        try:
            lo, hi = tuple(int(x) for x in b["lo"]), tuple(int(x) for x in b["hi"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{where}.box", "needs integer 'lo' and 'hi'") from None
        if len(lo) != len(hi) or any(x > y for x, y in zip(lo, hi)):
            raise FormatError(f"{where}.box", "empty or mismatched box")
        return grid_poset(lo, hi), (lo, hi)
    if "poset" in d:
        return poset_from_json(d["poset"], f"{where}.poset"), None
    raise FormatError(where, "module needs 'poset' or 'box'")


def module_from_json(d, where="$", field: Field = None, check: bool = True) -> EncodedModule:
    """Parse a module; a commutativity failure raises CommutativityError when ``check``."""
    if not isinstance(d, dict):
        raise FormatError(where, "module must be an object")
    f = field or field_from_json(d)
    poset, box = _carrier_from_json(d, where)
    table = _key_table(poset, where)
    dims = [0] * len(poset)
    for k, v in d.get("dims", {}).items():
        if not isinstance(v, int) or v < 0:
            raise FormatError(f'{where}.dims["{k}"]', "dimension must be a nonnegative integer")
        dims[_lookup(table, k, f'{where}.dims["{k}"]')] = v
    covers = set(poset.covers)
    maps = {}
    for k, rows in d.get("maps", {}).items():
        loc = f'{where}.maps["{k}"]'
        if "->" not in k:
            raise FormatError(loc, "cover keys look like 'a->b'")
        a, b = k.split("->", 1)
        i, j = _lookup(table, a, loc), _lookup(table, b, loc)
        if (i, j) not in covers:
            raise FormatError(loc, "not a cover relation")
        maps[(i, j)] = matrix_from_json(f, rows, (dims[j], dims[i]), loc)
    for i, j in poset.covers:
        if (i, j) not in maps and dims[i] and dims[j]:
            e = poset.elements
            raise FormatError(f"{where}.maps", f"missing map {key_of(e[i])}->{key_of(e[j])}")
    if box is not None:
        return FinDetModule(box[0], box[1], dims, maps, f, check=check, poset=poset)
    return EncodedModule(poset, dims, maps, f, check=check)


def morphism_to_json(phi: ModuleMorphism) -> dict:
    p, f = phi.source.poset, phi.field
    return {"source": module_to_json(phi.source), "target": module_to_json(phi.target),
            "comps": {key_of(e): matrix_to_json(f, c) for e, c in zip(p.elements, phi.comps) if c.size}}


def morphism_from_json(d, where="$", check: bool = True) -> ModuleMorphism:
    src = module_from_json(d["source"], f"{where}.source")
    tgt = module_from_json(d["target"], f"{where}.target", field=src.field)
    if src.poset != tgt.poset:
        raise FormatError(where, "source and target live on different carriers")
    f = src.field
    table = _key_table(src.poset, where)
    comps = [f.zeros(dt, ds) for ds, dt in zip(src.dims, tgt.dims)]
    for k, rows in d.get("comps", {}).items():
        loc = f'{where}.comps["{k}"]'
        i = _lookup(table, k, loc)
        comps[i] = matrix_from_json(f, rows, (tgt.dims[i], src.dims[i]), loc)
    return ModuleMorphism(src, tgt, comps, check=check)


# monomial matrices


def label_to_json(lab) -> dict:
    kind = "flat" if isinstance(lab, FlatLabel) else "injective"
    return {"kind": kind, "b": list(lab.b), "tau": list(lab.tau)}


def label_from_json(d, where="$"):
    try:
        cls = FlatLabel if d.get("kind", "flat") == "flat" else InjLabel
        return cls(tuple(int(x) for x in d["b"]), tuple(int(x) for x in d.get("tau", [])))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(where, f"bad label ({exc})") from None


def _entries_to_json(f: Field, a) -> dict:
    return {f"({p},{q})": f.fmt(a[p, q]) for p in range(a.shape[0]) for q in range(a.shape[1]) if a[p, q] != 0}


def _entries_from_json(f: Field, d, shape, where) -> np.ndarray:
    a = f.zeros(*shape)
    for k, v in d.items():
        loc = f'{where}["{k}"]'
        try:
            p, q = (int(x) for x in k.strip("()").split(","))
        except ValueError:
            raise FormatError(loc, "entry keys look like '(p,q)'") from None
        if not (0 <= p < shape[0] and 0 <= q < shape[1]):
            raise FormatError(loc, "index out of range")
        try:
            a[p, q] = f(v)
        except (ValueError, ZeroDivisionError):
            raise FormatError(loc, f"bad scalar {v!r}") from None
    return a


def monomial_matrix_to_json(mm: MonomialMatrix) -> dict:
    return {"field": mm.field.name, "rows": [label_to_json(x) for x in mm.rows],
            "cols": [label_to_json(x) for x in mm.cols], "entries": _entries_to_json(mm.field, mm.entries)}


def monomial_matrix_from_json(d, where="$") -> MonomialMatrix:
    f = field_from_json(d)
    rows = [label_from_json(x, f"{where}.rows[{k}]") for k, x in enumerate(d.get("rows", []))]
    cols = [label_from_json(x, f"{where}.cols[{k}]") for k, x in enumerate(d.get("cols", []))]
    ent = _entries_from_json(f, d.get("entries", {}), (len(rows), len(cols)), f"{where}.entries")
    return MonomialMatrix(rows, cols, ent, f)


def _as_box_region(r: PosetRegion):
    """FinDetRegion view of a region on a box carrier, else None."""
    els = r.poset.elements
    if not els or not isinstance(els[0], tuple):
        return None
    lo = tuple(min(e[k] for e in els) for k in range(len(els[0])))
    hi = tuple(max(e[k] for e in els) for k in range(len(els[0])))
    if grid_poset(lo, hi) != r.poset:
        return None
    shape = tuple(b - a + 1 for a, b in zip(lo, hi))
    return FinDetRegion(lo, hi, r.mask.reshape(shape), r.kind, check=False)


def fringe_to_json(phi) -> dict:
    """Fringe monomial matrix: rows are upsets, columns downsets.

    Regions are member lists on a finite carrier and box bitsets when the
    carrier is an integer box.
    """
    carrier = phi.carrier
    regions = phi.rows + phi.cols

    def reg(r):
        b = _as_box_region(r)
        return box_region_to_json(b) if b is not None else region_to_json(r)

    out = {"field": phi.field.name}
    if carrier is not None and (not regions or _as_box_region(regions[0]) is None):
        out["carrier"] = poset_to_json(carrier)
    out["rows"] = [reg(r) for r in phi.rows]
    out["cols"] = [reg(r) for r in phi.cols]
    out["entries"] = _entries_to_json(phi.field, phi.entries)
    return out


def fringe_from_json(d, where="$"):
    """(rows, cols, entries, field) with every region as a PosetRegion on one carrier."""
    from .fringe import MonomialMatrixFringe
    f = field_from_json(d)
    carrier = poset_from_json(d["carrier"], f"{where}.carrier") if "carrier" in d else None

    def reg(x, loc):
        r = region_from_json(x, carrier, loc)
        return box_region_as_poset_region(r) if isinstance(r, FinDetRegion) else r

    rows = [reg(x, f"{where}.rows[{k}]") for k, x in enumerate(d.get("rows", []))]
    cols = [reg(x, f"{where}.cols[{k}]") for k, x in enumerate(d.get("cols", []))]
    ent = _entries_from_json(f, d.get("entries", {}), (len(rows), len(cols)), f"{where}.entries")
    return MonomialMatrixFringe(rows, cols, ent, f)


# filtrations, encodings, reports


def filtration_to_json(fil: MultiFiltration) -> dict:
    return {"n": fil.n, "simplices": [{"vertices": [id_to_json(v) for v in s.vertices],
                                       "entries": [list(e) for e in s.entries]} for s in fil.simplices]}


def filtration_from_json(d, where="$") -> MultiFiltration:
    try:
        simplices = [(s["vertices"], s["entries"]) for s in d["simplices"]]
        return MultiFiltration(int(d["n"]), simplices)
    except (KeyError, TypeError) as exc:
        raise FormatError(where, f"filtration needs 'n' and 'simplices' ({exc})") from None
    except ValueError as exc:
        raise FormatError(f"{where}.simplices", str(exc)) from None


def encoding_to_json(enc) -> dict:
    q = enc.pi.source
    out = {}
    if isinstance(enc.witness.target, FinDetModule):
        t = enc.witness.target
        out["box"] = {"lo": list(t.lo), "hi": list(t.hi)}
    else:
        out["carrier"] = poset_to_json(q)
    out["pi"] = {key_of(e): id_to_json(enc.H.poset.elements[j]) for e, j in zip(q.elements, enc.pi.images)}
    out["H"] = module_to_json(enc.H)
    return out


def encoding_from_json(d, where="$"):
    """An Encoding whose witness is the identity of π*H."""
    from .encoding import Encoding
    from .module import pullback
    h = module_from_json(d["H"], f"{where}.H")
    if "box" in d:
        carrier, box = _carrier_from_json(d, where)
    elif "carrier" in d:
        carrier, box = poset_from_json(d["carrier"], f"{where}.carrier"), None
    else:
        raise FormatError(where, "encoding needs 'carrier' or 'box'")
    table = _key_table(carrier, where)
    images = [None] * len(carrier)
    for k, v in d.get("pi", {}).items():
        loc = f'{where}.pi["{k}"]'
        j = h.poset.index.get(id_from_json(v))
        if j is None:
            raise FormatError(loc, f"unknown encoding element {v!r}")
        images[_lookup(table, k, loc)] = j
    if None in images:
        raise FormatError(f"{where}.pi", f"no image for {carrier.elements[images.index(None)]!r}")
    try:
        pi = PosetMorphism(carrier, h.poset, tuple(images))
    except ValueError as exc:
        raise FormatError(f"{where}.pi", str(exc)) from None
    pb = pullback(h, pi)
    if box is not None:
        pb = FinDetModule(box[0], box[1], pb.dims, pb.maps, h.field, check=False, poset=carrier)
    wit = ModuleMorphism(pb, pb, [h.field.eye(x) for x in pb.dims], check=False)
    return Encoding(pi, h, wit)


def partition_from_json(d, poset: FinitePoset, where="$") -> list:
    blocks = d["blocks"] if isinstance(d, dict) else d
    out = []
    for k, b in enumerate(blocks):
        ids = []
        for e in b:
            e = id_from_json(e)
            if e not in poset.index:
                raise FormatError(f"{where}[{k}]", f"unknown element {e!r}")
            ids.append(poset.index[e])
        out.append(ids)
    return out


def decomposition_to_json(dec) -> dict:
    return {"components": [{"tau": list(c.tau), "quotient": module_to_json(c.quotient)} for c in dec.components],
            "injective": bool(dec.combined is None or dec.is_injective())}


_LEAF_LIST = re.compile(r"\[[^\[\]{}]*\]")


def dumps(obj) -> str:
    """Indented JSON with lists of scalars kept on one line."""
    text = json.dumps(obj, indent=1, ensure_ascii=False)
    return _LEAF_LIST.sub(lambda m: re.sub(r"\s*\n\s*", " ", m.group(0)).replace("[ ", "[").replace(" ]", "]"),
                          text) + "\n"


def load_path(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
