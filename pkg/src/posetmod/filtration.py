"""Multifiltered simplicial complexes and their homology modules.

A simplex may enter at several incomparable degrees; it is present at q
when some entry degree is <= q.  Homology is computed once per distinct
subcomplex, which is exactly the natural encoding by the poset of
subcomplexes, and pulled back to the integer box of entry degrees with one
layer of margin below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .encoding import Encoding
from .field import QQ, Field
from .module import EncodedModule, FinDetModule, ModuleMorphism, grid_poset, pullback
from .poset import FinitePoset, PosetMorphism, sort_ids


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    entries: tuple

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def present(self, q) -> bool:
        return any(all(a <= b for a, b in zip(e, q)) for e in self.entries)


class FiltrationError(ValueError):
    def __init__(self, witness, msg):
        self.witness = witness
        super().__init__(f"{msg}: {witness}")


class MultiFiltration:
    def __init__(self, n: int, simplices):
        self.n = int(n)
        out, seen = [], set()
        for s in simplices:
            if isinstance(s, Simplex):
                verts, entries = s.vertices, s.entries
            elif isinstance(s, dict):
                verts, entries = s["vertices"], s["entries"]
            else:
                verts, entries = s
            verts = tuple(sort_ids(verts))
            if len(set(verts)) != len(verts) or not verts:
                raise ValueError(f"bad vertex list {verts}")
            if verts in seen:
                raise ValueError(f"simplex {verts} listed twice")
            seen.add(verts)
            entries = tuple(sorted({tuple(int(x) for x in e) for e in entries}))
            if not entries or any(len(e) != self.n for e in entries):
                raise ValueError(f"simplex {verts} needs entry degrees with {self.n} coordinates")
            out.append(Simplex(verts, entries))
        # faces before cofaces, then lexicographic: fixes orientation and order
        self.simplices = sorted(out, key=lambda s: (s.dim, s.vertices))
        self.index = {s.vertices: i for i, s in enumerate(self.simplices)}

    def __len__(self):
        return len(self.simplices)

    def __repr__(self):
        return f"MultiFiltration(n={self.n}, simplices={len(self)})"

    def box(self, margin: int = 1):
        if not self.simplices:
            z = tuple([0] * self.n)
            return tuple(x - margin for x in z), z
        pts = np.array([e for s in self.simplices for e in s.entries], dtype=int)
        lo = tuple(int(x) - margin for x in pts.min(axis=0))
        hi = tuple(int(x) for x in pts.max(axis=0))
        return lo, hi

    def subcomplex(self, q) -> frozenset:
        return frozenset(i for i, s in enumerate(self.simplices) if s.present(q))

    def boundary(self, k: int, rows, cols, f: Field = QQ) -> np.ndarray:
        """Matrix of ∂_k from the simplices ``cols`` to the simplices ``rows``."""
        pos = {r: a for a, r in enumerate(rows)}
        out = f.zeros(len(rows), len(cols))
        for c, j in enumerate(cols):
            v = self.simplices[j].vertices
            for t in range(len(v)):
                face = v[:t] + v[t + 1:]
                i = self.index.get(face)
                if i is not None and i in pos:
                    out[pos[i], c] = f.norm(1 if t % 2 == 0 else -1)
        return out


def validate(fil: MultiFiltration):
    """None if every face enters no later than its cofaces, else a witness.

    The witness is (simplex, face, degree): the simplex is present at the
    degree but the face is not (or is missing altogether).
    """
    for s in fil.simplices:
        if s.dim == 0:
            continue
        for t in range(len(s.vertices)):
            face = s.vertices[:t] + s.vertices[t + 1:]
            i = fil.index.get(face)
            for e in s.entries:
                if i is None or not fil.simplices[i].present(e):
                    return (s.vertices, face, e)
    return None


def check_filtration(fil: MultiFiltration):
    w = validate(fil)
    if w is not None:
        raise FiltrationError(w, "face enters after its coface")


@dataclass
class _Homology:
    cells: list
    boundaries: np.ndarray
    reps: np.ndarray

    @property
    def dim(self) -> int:
        return self.reps.shape[1]


def _homology(fil: MultiFiltration, sub: frozenset, k: int, f: Field) -> _Homology:
    by_dim = {}
    for i in sorted(sub):
        by_dim.setdefault(fil.simplices[i].dim, []).append(i)
    cells = by_dim.get(k, [])
    below, above = by_dim.get(k - 1, []), by_dim.get(k + 1, [])
    z = f.nullspace(fil.boundary(k, below, cells, f)) if below else f.eye(len(cells))
    b = f.colspace(fil.boundary(k + 1, cells, above, f)) if above else f.zeros(len(cells), 0)
    reps = []
    cur = b
    for c in range(z.shape[1]):
        v = z[:, c:c + 1]
        trial = np.concatenate([cur, v], axis=1)
        if f.rank(trial) > cur.shape[1]:
            cur = trial
            reps.append(v)
    r = np.concatenate(reps, axis=1) if reps else f.zeros(len(cells), 0)
    return _Homology(cells, b, r)


def _induced(fil, x: _Homology, y: _Homology, f: Field) -> np.ndarray:
    """Matrix of H(X) -> H(Y) in the chosen representative bases."""
    if not x.dim or not y.dim:
        return f.zeros(y.dim, x.dim)
    pos = {c: a for a, c in enumerate(y.cells)}
    v = f.zeros(len(y.cells), x.dim)
    for a, c in enumerate(x.cells):
        v[pos[c]] = x.reps[a]
    basis = np.concatenate([y.boundaries, y.reps], axis=1)
    sol = f.solve(basis, v)
    if sol is None:
        raise RuntimeError("cycle does not lie in the span of boundaries and representatives")
    return sol[y.boundaries.shape[1]:].copy()


def natural_encoding(fil: MultiFiltration, k: int, field: Field = QQ, margin: int = 1) -> Encoding:
    """π sends a box degree to its subcomplex; H is homology on the subcomplex poset.

    The witness is the identity from π*H to the box module returned by
    ``persistent_homology``.
    """
    check_filtration(fil)
    lo, hi = fil.box(margin)
    grid = grid_poset(lo, hi)
    subs = [fil.subcomplex(q) for q in grid.elements]
    distinct = sorted(set(subs), key=lambda s: (len(s), sorted(s)))
    ids = {s: a for a, s in enumerate(distinct)}
    leq = np.array([[a <= b for b in distinct] for a in distinct], dtype=bool)
    poset = FinitePoset(range(len(distinct)), leq, check=False)
    hom = [_homology(fil, s, k, field) for s in distinct]
    maps = {(a, b): _induced(fil, hom[a], hom[b], field) for a, b in poset.covers}
    h = EncodedModule(poset, [x.dim for x in hom], maps, field, check=False)
    pi = PosetMorphism(grid, poset, tuple(ids[s] for s in subs))
    dims = [h.dims[j] for j in pi.images]
    cover_maps = {(i, j): h.transition(pi.images[i], pi.images[j]) for i, j in grid.covers}
    m = FinDetModule(lo, hi, dims, cover_maps, field, check=False, poset=grid)
    wit = ModuleMorphism(pullback(h, pi), m, [field.eye(d) for d in dims], check=True)
    return Encoding(pi, h, wit)


def persistent_homology(fil: MultiFiltration, k: int, field: Field = QQ, margin: int = 1) -> FinDetModule:
    """H_k of the filtration as a finitely determined module on the entry box."""
    return natural_encoding(fil, k, field, margin).witness.target


def homology_dims(fil: MultiFiltration, k: int, q, field: Field = QQ) -> int:
    return _homology(fil, fil.subcomplex(q), k, field).dim


def box_degrees(lo, hi):
    return list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]))
