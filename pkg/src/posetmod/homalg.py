"""Matlis duality, injective and flat hulls, resolutions and flange presentations
for finitely determined Z^n-modules.

Injective hulls come from socles of localizations: for a face τ and a degree
b (taken modulo Zτ), the elements of M at b pushed to the top of the box
along τ that are killed by every unit step off τ.  Each basis vector of that
socle gives a summand k[b + Zτ - N^n].  The hull map is checked for
injectivity afterwards and summands are dropped greedily while it stays
injective, so the construction never relies on the socle count alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import Field
from .lattice import FlatLabel, InjLabel, all_faces, meeting_degree
from .module import FinDetModule, ModuleMorphism, cokernel, grid_poset


class HullError(RuntimeError):
    def __init__(self, degree, msg="hull map is not injective"):
        self.degree = degree
        super().__init__(f"{msg} at degree {degree}")


# duality


def matlis_dual(m: FinDetModule) -> FinDetModule:
    """Degreewise dual with negated grading: (M∨)_a = Hom(M_{-a}, k)."""
    lo = tuple(-x for x in m.hi)
    hi = tuple(-x for x in m.lo)
    grid = grid_poset(lo, hi)
    dims = [m.dim_at(tuple(-x for x in q)) for q in grid.elements]
    maps = {}
    for a, b in grid.covers:
        qa = tuple(-x for x in grid.elements[a])
        qb = tuple(-x for x in grid.elements[b])
        maps[(a, b)] = m.map_between(qb, qa).T.copy()
    return FinDetModule(lo, hi, dims, maps, m.field, check=False, poset=grid)


def dual_morphism(phi: ModuleMorphism, source_dual=None, target_dual=None) -> ModuleMorphism:
    """φ∨ : B∨ -> A∨ for φ : A -> B between modules on a common box."""
    a, b = phi.source, phi.target
    ad = source_dual or matlis_dual(a)
    bd = target_dual or matlis_dual(b)
    comps = [phi.comps[a.cell(tuple(-x for x in q))].T.copy() for q in bd.cells()]
    return ModuleMorphism(bd, ad, comps, check=False)


def double_dual_map(m: FinDetModule) -> ModuleMorphism:
    """The canonical map (M∨)∨ -> M; in the stored bases it is the identity."""
    dd = matlis_dual(matlis_dual(m))
    return ModuleMorphism(dd, m, [m.field.eye(d) for d in m.dims], check=True)


# sums of indecomposable flats and injectives


@dataclass
class InjectiveModule:
    labels: list

    def module(self, lo, hi, f: Field) -> FinDetModule:
        return _label_sum_module(self.labels, lo, hi, f)


@dataclass
class FlatModule:
    labels: list

    def module(self, lo, hi, f: Field) -> FinDetModule:
        return _label_sum_module(self.labels, lo, hi, f)


def _label_sum_module(labels, lo, hi, f: Field) -> FinDetModule:
    for lab in labels:
        if not lab.fits(lo, hi):
            raise ValueError(f"{lab} does not fit the box {lo}..{hi}")
    grid = grid_poset(lo, hi)
    present = [[j for j, lab in enumerate(labels) if q in lab] for q in grid.elements]
    maps = {}
    for a, b in grid.covers:
        pa, pb = present[a], present[b]
        m = f.zeros(len(pb), len(pa))
        where = {j: r for r, j in enumerate(pb)}
        for c, j in enumerate(pa):
            if j in where:
                m[where[j], c] = 1
        maps[(a, b)] = m
    return FinDetModule(lo, hi, [len(p) for p in present], maps, f, check=False, poset=grid)


def summand_positions(labels, q):
    return [j for j, lab in enumerate(labels) if q in lab]


@dataclass
class MonomialMatrix:
    """Scalars between labelled indecomposables: entry (p, q) maps row p to column q."""

    rows: list
    cols: list
    entries: np.ndarray
    field: Field

    @property
    def shape(self):
        return self.entries.shape

    def nonzero(self):
        return [(int(p), int(q)) for p, q in np.argwhere(np.vectorize(lambda x: x != 0, otypes=[bool])(self.entries))] \
            if self.entries.size else []


def monomial_matrix(phi: ModuleMorphism, rows, cols) -> MonomialMatrix:
    """Read scalars off a map between label sums (rows = source labels)."""
    m: FinDetModule = phi.source
    f = phi.field
    out = f.zeros(len(rows), len(cols))
    for p, rl in enumerate(rows):
        for q, cl in enumerate(cols):
            z = _common_degree(rl, cl, m.lo, m.hi)
            if z is None:
                continue
            i = m.cell(z)
            src = summand_positions(rows, z)
            tgt = summand_positions(cols, z)
            out[p, q] = phi.comps[i][tgt.index(q), src.index(p)]
    return MonomialMatrix(list(rows), list(cols), out, f)


def _common_degree(a, b, lo, hi):
    if isinstance(a, FlatLabel) and isinstance(b, InjLabel):
        return meeting_degree(a, b, lo, hi)
    for q in _candidate_degrees(a, b, lo, hi):
        if q in a and q in b:
            return q
    return None


def _candidate_degrees(a, b, lo, hi):
    # for two downsets the lower corner works, for two upsets the upper one
    if isinstance(a, InjLabel) and isinstance(b, InjLabel):
        yield tuple(lo)
    elif isinstance(a, FlatLabel) and isinstance(b, FlatLabel):
        yield tuple(hi)
    else:
        yield from itertools.product(*[range(x, y + 1) for x, y in zip(lo, hi)])


def matrix_to_morphism(mm: MonomialMatrix, source: FinDetModule, target: FinDetModule) -> ModuleMorphism:
    f = mm.field
    comps = []
    for q in source.cells():
        src = summand_positions(mm.rows, q)
        tgt = summand_positions(mm.cols, q)
        c = f.zeros(len(tgt), len(src))
        for a, p in enumerate(src):
            for b, r in enumerate(tgt):
                c[b, a] = mm.entries[p, r]
        comps.append(c)
    return ModuleMorphism(source, target, comps, check=False)


# generators and cogenerators


def generators(m: FinDetModule) -> list:
    """(degree, multiplicity) where coker(⊕ M_{q-e_i} -> M_q) is nonzero."""
    f = m.field
    out = []
    for q in m.cells():
        d = m.dim_at(q)
        if not d:
            continue
        ins = [m.map_between(tuple(x - (k == ax) for k, x in enumerate(q)), q) for ax in range(m.n)]
        r = f.rank(np.concatenate(ins, axis=1)) if ins else 0
        if d - r:
            out.append((q, d - r))
    return out


def _socles(m: FinDetModule):
    """(label, top degree, socle basis) for every face and degree class."""
    f = m.field
    out = []
    for tau in all_faces(m.n):
        off = [k for k in range(m.n) if k not in tau]
        ranges = [range(m.lo[k], m.hi[k]) if k in off else [m.hi[k]] for k in range(m.n)]
        for t in itertools.product(*ranges):
            d = m.dim_at(t)
            if not d:
                continue
            if off:
                kill = np.concatenate([m.step(t, k) for k in off], axis=0)
                s = f.nullspace(kill)
            else:
                s = f.eye(d)
            if s.shape[1]:
                out.append((InjLabel(t, tau), t, s))
    return out


def cogenerators(m: FinDetModule) -> list:
    """(InjLabel, multiplicity) read from socles of localizations, by face bitmask."""
    return [(lab, s.shape[1]) for lab, _, s in _socles(m)]


def _piece_rows(m: FinDetModule, pieces):
    """For each piece, its functional pulled back to every cell inside its label (else None)."""
    f = m.field
    out = []
    for lab, t, fun in pieces:
        out.append([f.matmul(fun, m.map_between(q, t)) if q in lab else None for q in m.cells()])
    return out


def _hull_rows(m: FinDetModule, pieces, rows=None, keep=None):
    """Per-cell hull matrices for a list of (label, top degree, functional rows)."""
    f = m.field
    rows = _piece_rows(m, pieces) if rows is None else rows
    keep = range(len(rows)) if keep is None else keep
    comps = []
    for idx in range(len(m.dims)):
        here = [rows[k][idx] for k in keep if rows[k][idx] is not None]
        comps.append(np.concatenate(here, axis=0) if here else f.zeros(0, m.dims[idx]))
    return comps


def _first_noninjective(m: FinDetModule, comps):
    f = m.field
    for q, c in zip(m.cells(), comps):
        if f.rank(c) < c.shape[1]:
            return q
    return None


@dataclass
class Hull:
    """An injective hull M -> E, with E stored as labels and as a box module."""

    labels: list
    module: FinDetModule
    map: ModuleMorphism
    dropped: list = dc_field(default_factory=list)

    @property
    def injective(self) -> InjectiveModule:
        return InjectiveModule(list(self.labels))


def injective_hull(m: FinDetModule, minimize: bool = True, retries: int = 2) -> Hull:
    """Minimal injective hull, verified injective degreewise on the box.

    If the map fails to be injective the box is enlarged by one layer and the
    computation repeated, at most ``retries`` times; the returned map then
    starts from the enlarged copy of M.
    """
    f = m.field
    for attempt in range(retries + 1):
        pieces = []
        for lab, t, s in _socles(m):
            fun = f.left_inverse(s)
            for r in range(fun.shape[0]):
                pieces.append((lab, t, fun[r:r + 1]))
        rows = _piece_rows(m, pieces)
        bad = _first_noninjective(m, _hull_rows(m, pieces, rows))
        if bad is None:
            break
        if attempt == retries:
            raise HullError(bad)
        m = m.enlarge(1)
    dropped = []
    keep = list(range(len(pieces)))
    if minimize:
        k = 0
        while k < len(keep):
            trial = keep[:k] + keep[k + 1:]
            if _first_noninjective(m, _hull_rows(m, pieces, rows, trial)) is None:
                dropped.append(pieces[keep[k]][0])
                keep = trial
            else:
                k += 1
    comps = _hull_rows(m, pieces, rows, keep)
    pieces = [pieces[k] for k in keep]
    labels = [p[0] for p in pieces]
    e = _label_sum_module(labels, m.lo, m.hi, f)
    return Hull(labels, e, ModuleMorphism(m, e, comps, check=False), dropped)


def is_minimal_hull(h: Hull) -> bool:
    """Dropping any single summand must break injectivity."""
    m = h.map.source
    f = m.field
    for j in range(len(h.labels)):
        ok = True
        for q, c in zip(m.cells(), h.map.comps):
            keep = [r for r, i in enumerate(summand_positions(h.labels, q)) if i != j]
            if f.rank(c[keep]) < c.shape[1]:
                ok = False
                break
        if ok:
            return False
    return True


# resolutions


@dataclass
class Resolution:
    """0 -> M -> E^0 -> E^1 -> ... (injective) or ... -> F_1 -> F_0 -> M -> 0 (flat).

    ``differentials[i]`` maps term i to term i+1 for injective resolutions and
    term i+1 to term i for flat ones.  ``matrices`` hold the same maps as
    monomial matrices with rows indexing the source summands.
    """

    kind: str
    module: FinDetModule
    terms: list
    term_modules: list
    augmentation: ModuleMorphism
    differentials: list
    matrices: list

    @property
    def length(self) -> int:
        return len(self.terms) - 1 if self.terms else 0

    def is_exact(self) -> bool:
        return resolution_exact(self)

    def is_minimal(self) -> bool:
        return resolution_minimal(self)


def minimal_injective_resolution(m: FinDetModule, retries: int = 2) -> Resolution:
    """Iterate injective hulls on cokernels; restart on a larger box if needed."""
    if m.is_zero():
        return Resolution("injective", m, [], [], None, [], [])
    for attempt in range(retries + 1):
        try:
            return _injective_resolution(m)
        except (HullError, RuntimeError):
            if attempt == retries:
                raise
            m = m.enlarge(1)


def _injective_resolution(m: FinDetModule) -> Resolution:
    terms, mods, diffs, mats = [], [], [], []
    h = injective_hull(m, retries=0)
    aug = h.map
    terms.append(h.labels)
    mods.append(h.module)
    cur_map = h.map
    for _ in range(m.n + 1):
        c, proj = cokernel(cur_map)
        if c.is_zero():
            break
        h = injective_hull(c, retries=0)
        d = proj.compose(h.map)
        mats.append(monomial_matrix(d, terms[-1], h.labels))
        diffs.append(d)
        terms.append(h.labels)
        mods.append(h.module)
        cur_map = d
    else:
        raise RuntimeError("injective resolution did not terminate within n+1 steps")
    return Resolution("injective", m, terms, mods, aug, diffs, mats)


def minimal_flat_resolution(m: FinDetModule) -> Resolution:
    """Dualize, resolve injectively, dualize back."""
    md = matlis_dual(m)
    inj = minimal_injective_resolution(md)
    if not inj.terms:
        return Resolution("flat", m, [], [], None, [], [])
    if inj.module is not md:
        m = matlis_dual(inj.module)
    terms = [[lab.dual() for lab in t] for t in inj.terms]
    mods = [matlis_dual(e) for e in inj.term_modules]
    aug = dual_morphism(inj.augmentation, source_dual=m, target_dual=mods[0])
    diffs, mats = [], []
    for i, d in enumerate(inj.differentials):
        dd = dual_morphism(d, source_dual=mods[i], target_dual=mods[i + 1])
        diffs.append(dd)
        mats.append(monomial_matrix(dd, terms[i + 1], terms[i]))
    return Resolution("flat", m, terms, mods, aug, diffs, mats)


def flat_cover(m: FinDetModule):
    """(labels, F, F -> M): the dual of an injective hull of M∨."""
    md = matlis_dual(m)
    h = injective_hull(md)
    if h.map.source is not md:
        m = matlis_dual(h.map.source)
    labels = [lab.dual() for lab in h.labels]
    fm = matlis_dual(h.module)
    return labels, fm, dual_morphism(h.map, source_dual=m, target_dual=fm)


def resolution_exact(res: Resolution) -> bool:
    """Degreewise exactness of the augmented complex, and d∘d = 0."""
    m = res.module
    f = m.field
    if not res.terms:
        return m.is_zero()
    for idx, q in enumerate(m.cells()):
        if res.kind == "injective":
            seq = [res.augmentation.comps[idx]] + [d.comps[idx] for d in res.differentials]
            dims = [m.dims[idx]] + [e.dims[idx] for e in res.term_modules]
            # 0 -> M -> E0 -> ... -> Ek -> 0
            ranks = [f.rank(a) for a in seq]
            if ranks[0] != dims[0]:
                return False
            for i in range(1, len(dims)):
                out = ranks[i] if i < len(ranks) else 0
                if ranks[i - 1] + out != dims[i]:
                    return False
            for a, b in zip(seq, seq[1:]):
                if not f.is_zero(f.matmul(b, a)):
                    return False
        else:
            seq = [d.comps[idx] for d in reversed(res.differentials)] + [res.augmentation.comps[idx]]
            dims = [e.dims[idx] for e in reversed(res.term_modules)] + [m.dims[idx]]
            # 0 -> Fk -> ... -> F0 -> M -> 0
            ranks = [f.rank(a) for a in seq]
            if ranks[-1] != dims[-1]:
                return False
            for i in range(len(dims) - 1):
                incoming = ranks[i - 1] if i else 0
                if incoming + ranks[i] != dims[i]:
                    return False
            for a, b in zip(seq, seq[1:]):
                if not f.is_zero(f.matmul(b, a)):
                    return False
    return True


def resolution_minimal(res: Resolution) -> bool:
    """Dropping any summand of any term loses rank somewhere.

    For an injective resolution the rows of a summand of E^i are removed
    from the map into E^i; for a flat one the columns of a summand of F_i
    are removed from the map out of F_i.  Either way a superfluous summand
    would leave every rank unchanged.
    """
    if not res.terms:
        return True
    f = res.module.field
    cells = list(res.module.cells())
    maps = [res.augmentation] + list(res.differentials)
    for i, labels in enumerate(res.terms):
        mp = maps[i]
        for j in range(len(labels)):
            lost = False
            for idx, q in enumerate(cells):
                pos = summand_positions(labels, q)
                if j not in pos:
                    continue
                c = mp.comps[idx]
                keep = [r for r, x in enumerate(pos) if x != j]
                cut = c[keep, :] if res.kind == "injective" else c[:, keep]
                if f.rank(cut) < f.rank(c):
                    lost = True
                    break
            if not lost:
                return False
    return True


# flange presentations


@dataclass
class Flange:
    matrix: MonomialMatrix
    flat_cover: ModuleMorphism
    hull: ModuleMorphism
    flat_module: FinDetModule
    injective_module: FinDetModule


def flange_presentation(m: FinDetModule) -> Flange:
    """Flat cover followed by injective hull; the image is checked to be M."""
    f = m.field
    if m.is_zero():
        empty = MonomialMatrix([], [], f.zeros(0, 0), f)
        return Flange(empty, None, None, None, None)
    labels, flat_module, cover = flat_cover(m)
    m = cover.target
    h = injective_hull(m)
    if h.map.source is not m:
        raise HullError(None, "hull needed a larger box than the flat cover")
    phi = cover.compose(h.map)
    for q, a, b in zip(m.cells(), phi.comps, h.map.comps):
        r = f.rank(a)
        if r != b.shape[1] or f.rank(np.concatenate([a, b], axis=1)) != r:
            raise HullError(q, "flange image differs from the module")
    mm = monomial_matrix(phi, labels, h.labels)
    for p, q in mm.nonzero():
        if meeting_degree(mm.rows[p], mm.cols[q], m.lo, m.hi) is None:
            raise HullError(None, "flange entry violates the support rule")
    return Flange(mm, cover, h.map, flat_module, h.module)
