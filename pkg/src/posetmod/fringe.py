"""Fringe presentations and indicator resolutions of encoded modules.

Pipeline: encode M by (π, H), embed the encoding poset in Z^n, push H
forward to a finitely determined module, resolve or present it there with
flat and injective labels, and pull every label back along ι∘π.  Pulled-back
labels are unions of fibers of π, hence upsets and downsets of the carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .encoding import Encoding, identity_encoding
from .field import Field
from .homalg import (Resolution, flange_presentation, minimal_flat_resolution,
                     minimal_injective_resolution)
from .module import EncodedModule, FinDetModule, ModuleMorphism, image, pushforward
from .poset import FinitePoset, PosetRegion, embed_into_grid, pi0


@dataclass
class MonomialMatrixFringe:
    """Rows are upsets (source summands), columns downsets (target summands)."""

    rows: list
    cols: list
    entries: np.ndarray
    field: Field
    cover: ModuleMorphism = None
    hull: ModuleMorphism = None
    row_labels: list = dc_field(default_factory=list)
    col_labels: list = dc_field(default_factory=list)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def carrier(self) -> FinitePoset:
        return self.rows[0].poset if self.rows else (self.cols[0].poset if self.cols else None)

    def nonzero(self):
        return [(p, q) for p in range(self.entries.shape[0]) for q in range(self.entries.shape[1])
                if self.entries[p, q] != 0]


def indicator_sum(poset: FinitePoset, regions, f: Field) -> EncodedModule:
    """⊕ k[R] over the listed regions, with the stored summand order at each element."""
    present = [[j for j, r in enumerate(regions) if r.mask[i]] for i in range(len(poset))]
    maps = {}
    for a, b in poset.covers:
        pa, pb = present[a], present[b]
        m = f.zeros(len(pb), len(pa))
        where = {j: r for r, j in enumerate(pb)}
        for c, j in enumerate(pa):
            if j in where:
                m[where[j], c] = 1
        maps[(a, b)] = m
    return EncodedModule(poset, [len(p) for p in present], maps, f, check=False)


def materialize(rows, cols, entries, f: Field, source=None, target=None) -> ModuleMorphism:
    """The map ⊕ k[rows] -> ⊕ k[cols] whose component p -> q is entries[p, q] on the overlap."""
    poset = (rows or cols)[0].poset
    source = source or indicator_sum(poset, rows, f)
    target = target or indicator_sum(poset, cols, f)
    comps = []
    for i in range(len(poset)):
        src = [p for p, r in enumerate(rows) if r.mask[i]]
        tgt = [q for q, c in enumerate(cols) if c.mask[i]]
        c = f.zeros(len(tgt), len(src))
        for a, p in enumerate(src):
            for b, q in enumerate(tgt):
                c[b, a] = entries[p, q]
        comps.append(c)
    return ModuleMorphism(source, target, comps, check=False)


# carrying Z^n data back to the carrier


@dataclass
class _Pipeline:
    encoding: Encoding
    coords: np.ndarray
    pushed: FinDetModule

    @property
    def carrier(self) -> FinitePoset:
        return self.encoding.pi.source

    def cell_of(self):
        """Box cell index of ι(π(q)) for every carrier element q."""
        pts = self.coords[list(self.encoding.pi.images)]
        return [self.pushed.cell(tuple(int(x) for x in p)) for p in pts]

    def region(self, label, kind) -> PosetRegion:
        pts = self.coords[list(self.encoding.pi.images)]
        mask = np.array([tuple(int(x) for x in p) in label for p in pts], dtype=bool)
        return PosetRegion(self.carrier, mask, kind, check=False)


def _pipeline(m, encoding: Encoding = None, margin: int = 1) -> _Pipeline:
    if isinstance(m, FinDetModule) and encoding is None:
        enc = identity_encoding(m)
        coords = np.array(m.poset.elements, dtype=int).reshape(len(m.poset), m.n)
        return _Pipeline(enc, coords, m)
    enc = encoding or identity_encoding(m)
    _, coords = embed_into_grid(enc.H.poset)
    lo = tuple(int(x) - margin for x in coords.min(axis=0))
    hi = tuple(int(x) for x in coords.max(axis=0))
    return _Pipeline(enc, coords, pushforward(coords, enc.H, lo, hi))


def _witness_maps(pl: _Pipeline):
    """Components of π*H -> M and of its inverse."""
    w = pl.encoding.witness
    return w.comps, [w.field.inverse(c) for c in w.comps]


def fringe_presentation(m, encoding: Encoding = None, margin: int = 1) -> MonomialMatrixFringe:
    """Fringe presentation of M pulled back from a flange of the pushforward.

    ``m`` is an EncodedModule (encoded by ``encoding``, default the identity)
    or a FinDetModule, whose box is used directly.  Summands whose pulled
    back region is empty are dropped.
    """
    pl = _pipeline(m, encoding, margin)
    f = pl.pushed.field
    target_m = pl.encoding.witness.target
    fl = flange_presentation(pl.pushed)
    if fl.flat_cover is None:
        z = f.zeros(0, 0)
        return MonomialMatrixFringe([], [], z, f)
    rows = [pl.region(lab, "upset") for lab in fl.matrix.rows]
    cols = [pl.region(lab, "downset") for lab in fl.matrix.cols]
    keep_r = [p for p, r in enumerate(rows) if r]
    keep_c = [q for q, c in enumerate(cols) if c]
    entries = fl.matrix.entries[np.ix_(keep_r, keep_c)].copy() if keep_r and keep_c \
        else f.zeros(len(keep_r), len(keep_c))
    rows = [rows[p] for p in keep_r]
    cols = [cols[q] for q in keep_c]
    fmod = indicator_sum(pl.carrier, rows, f)
    emod = indicator_sum(pl.carrier, cols, f)
    cells = pl.cell_of()
    w_in, w_out = _witness_maps(pl)
    cover_c, hull_c = [], []
    for i, c in enumerate(cells):
        src_all = [j for j, lab in enumerate(fl.matrix.rows) if _cell_point(pl, i) in lab]
        tgt_all = [j for j, lab in enumerate(fl.matrix.cols) if _cell_point(pl, i) in lab]
        rsel = [src_all.index(j) for j in keep_r if j in src_all]
        csel = [tgt_all.index(j) for j in keep_c if j in tgt_all]
        cover_c.append(f.matmul(w_in[i], fl.flat_cover.comps[c][:, rsel]))
        hull_c.append(f.matmul(fl.hull.comps[c][csel, :], w_out[i]))
    cover = ModuleMorphism(fmod, target_m, cover_c, check=False)
    hull = ModuleMorphism(target_m, emod, hull_c, check=False)
    return MonomialMatrixFringe(rows, cols, entries, f, cover, hull,
                                [fl.matrix.rows[p] for p in keep_r], [fl.matrix.cols[q] for q in keep_c])


def _cell_point(pl: _Pipeline, i: int):
    return tuple(int(x) for x in pl.coords[pl.encoding.pi.images[i]])


@dataclass
class FringeCheck:
    ok: bool
    reason: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


def check_fringe(phi: MonomialMatrixFringe, m: EncodedModule, hull: ModuleMorphism = None,
                 seed: int = 0, tries: int = 8) -> FringeCheck:
    """Support rule, connected components, and image isomorphic to M.

    With a copresentation ``hull`` M -> E the image test is exact: the hull
    must be injective with the same image as φ.  Otherwise random elements of
    Hom(M, im φ) are tried for invertibility.
    """
    f = phi.field
    for p, q in phi.nonzero():
        if not (phi.rows[p] & phi.cols[q]):
            return FringeCheck(False, "support rule", (p, q))
    for r in phi.rows:
        if r.kind != "upset" or not _closed(r, up=True):
            return FringeCheck(False, "row label is not an upset", r)
    for c in phi.cols:
        if c.kind != "downset" or not _closed(c, up=False):
            return FringeCheck(False, "column label is not a downset", c)
    if not phi.rows or not phi.cols:
        return FringeCheck(m.is_zero(), "empty presentation of a nonzero module")
    mor = materialize(phi.rows, phi.cols, phi.entries, f)
    try:
        mor.check()
    except ValueError as e:
        return FringeCheck(False, "components are not connected homomorphisms", getattr(e, "witness", None))
    hull = hull if hull is not None else phi.hull
    if hull is not None and hull.target.dims == mor.target.dims:
        try:
            hull.check()
        except ValueError as e:
            return FringeCheck(False, "copresentation is not a homomorphism", getattr(e, "witness", None))
        for i, (a, b) in enumerate(zip(mor.comps, hull.comps)):
            r = f.rank(b)
            if r != b.shape[1]:
                return FringeCheck(False, "copresentation is not injective", m.poset.elements[i])
            if f.rank(a) != r or f.rank(np.concatenate([a, b], axis=1)) != r:
                return FringeCheck(False, "image differs from the module", m.poset.elements[i])
        return FringeCheck(True)
    from .oracle import find_isomorphism
    im, _, _ = image(mor)
    iso = find_isomorphism(m, im, seed=seed, tries=tries)
    if iso is None:
        return FringeCheck(False, "no isomorphism from the module onto the image found")
    return FringeCheck(True, witness=iso)


def verify_fringe(phi: MonomialMatrixFringe, m: EncodedModule, hull: ModuleMorphism = None, seed: int = 0) -> bool:
    return bool(check_fringe(phi, m, hull, seed))


def _closed(r: PosetRegion, up: bool) -> bool:
    leq = r.poset.leq
    if up:
        return bool((leq[r.mask].any(axis=0) <= r.mask).all()) if r.mask.any() else True
    return bool((leq[:, r.mask].any(axis=1) <= r.mask).all()) if r.mask.any() else True


def is_connected_component_map(phi: MonomialMatrixFringe) -> bool:
    """Each nonzero entry is a scalar on U ∩ D; report whether every such overlap is connected."""
    return all(len(pi0(phi.rows[p] & phi.cols[q])) == 1 for p, q in phi.nonzero())


# indicator resolutions


@dataclass
class IndicatorResolution:
    """Resolution by upset modules (``side='upset'``) or downset modules.

    ``terms[i]`` lists the regions of term i.  For the upset side
    ``differentials[i]`` maps term i+1 to term i and the augmentation maps
    term 0 onto M; for the downset side ``differentials[i]`` maps term i to
    term i+1 and the augmentation embeds M in term 0.  ``matrices[i]`` has
    rows indexing the source of ``differentials[i]``.
    """

    side: str
    module: EncodedModule
    terms: list
    term_modules: list
    augmentation: ModuleMorphism
    differentials: list
    matrices: list
    labels: list = dc_field(default_factory=list)

    @property
    def length(self) -> int:
        return max(len(self.terms) - 1, 0)

    def is_exact(self) -> bool:
        return indicator_resolution_exact(self)


def _pull_resolution(pl: _Pipeline, res: Resolution, side: str) -> IndicatorResolution:
    f = pl.pushed.field
    m = pl.encoding.witness.target
    if not res.terms:
        return IndicatorResolution(side, m, [], [], None, [], [])
    kind = "upset" if side == "upset" else "downset"
    keeps, terms, labels = [], [], []
    for t in res.terms:
        regs = [pl.region(lab, kind) for lab in t]
        keep = [j for j, r in enumerate(regs) if r]
        keeps.append(keep)
        terms.append([regs[j] for j in keep])
        labels.append([t[j] for j in keep])
    mods = [indicator_sum(pl.carrier, t, f) for t in terms]
    pts = [_cell_point(pl, i) for i in range(len(pl.carrier))]
    cells = pl.cell_of()

    def sel(labs, keep, q):
        present = [j for j, lab in enumerate(labs) if q in lab]
        return [present.index(j) for j in keep if j in present]

    w_in, w_out = _witness_maps(pl)
    aug_c = []
    for i, c in enumerate(cells):
        s = sel(res.terms[0], keeps[0], pts[i])
        a = res.augmentation.comps[c]
        aug_c.append(f.matmul(w_in[i], a[:, s]) if side == "upset" else f.matmul(a[s, :], w_out[i]))
    aug = ModuleMorphism(mods[0], m, aug_c, check=False) if side == "upset" \
        else ModuleMorphism(m, mods[0], aug_c, check=False)
    diffs, mats = [], []
    for k, d in enumerate(res.differentials):
        s_idx, t_idx = (k + 1, k) if side == "upset" else (k, k + 1)
        comps = []
        for i, c in enumerate(cells):
            rs = sel(res.terms[t_idx], keeps[t_idx], pts[i])
            cs = sel(res.terms[s_idx], keeps[s_idx], pts[i])
            comps.append(d.comps[c][np.ix_(rs, cs)].copy() if rs and cs else f.zeros(len(rs), len(cs)))
        diffs.append(ModuleMorphism(mods[s_idx], mods[t_idx], comps, check=False))
        mm = res.matrices[k].entries
        ks, kt = keeps[s_idx], keeps[t_idx]
        mats.append(mm[np.ix_(ks, kt)].copy() if ks and kt else f.zeros(len(ks), len(kt)))
    return IndicatorResolution(side, m, terms, mods, aug, diffs, mats, labels)


def upset_resolution(m, encoding: Encoding = None, margin: int = 1) -> IndicatorResolution:
    """Pull back a minimal flat resolution of the pushforward."""
    pl = _pipeline(m, encoding, margin)
    return _pull_resolution(pl, minimal_flat_resolution(pl.pushed), "upset")


def downset_resolution(m, encoding: Encoding = None, margin: int = 1) -> IndicatorResolution:
    """Pull back a minimal injective resolution of the pushforward."""
    pl = _pipeline(m, encoding, margin)
    return _pull_resolution(pl, minimal_injective_resolution(pl.pushed), "downset")


def upset_presentation(m, encoding: Encoding = None, margin: int = 1) -> IndicatorResolution:
    """F1 -> F0 -> M -> 0, the first two terms of an upset resolution."""
    r = upset_resolution(m, encoding, margin)
    return IndicatorResolution(r.side, r.module, r.terms[:2], r.term_modules[:2], r.augmentation,
                               r.differentials[:1], r.matrices[:1], r.labels[:2])


def downset_copresentation(m, encoding: Encoding = None, margin: int = 1) -> IndicatorResolution:
    """0 -> M -> E0 -> E1, the first two terms of a downset resolution."""
    r = downset_resolution(m, encoding, margin)
    return IndicatorResolution(r.side, r.module, r.terms[:2], r.term_modules[:2], r.augmentation,
                               r.differentials[:1], r.matrices[:1], r.labels[:2])


def indicator_resolution_exact(res: IndicatorResolution, full: bool = True) -> bool:
    """Degreewise exactness of the augmented complex and d∘d = 0.

    Truncated presentations are only checked at the module end; pass
    ``full=False`` to skip the far end for them.
    """
    m = res.module
    f = m.field
    if not res.terms:
        return m.is_zero()
    for i in range(len(m.poset)):
        if res.side == "upset":
            seq = [d.comps[i] for d in reversed(res.differentials)] + [res.augmentation.comps[i]]
            dims = [t.dims[i] for t in reversed(res.term_modules)] + [m.dims[i]]
            ranks = [f.rank(a) for a in seq]
            if ranks[-1] != dims[-1]:
                return False
            for k in range(len(dims) - 1):
                incoming = ranks[k - 1] if k else 0
                if (full or k) and incoming + ranks[k] != dims[k]:
                    return False
        else:
            seq = [res.augmentation.comps[i]] + [d.comps[i] for d in res.differentials]
            dims = [m.dims[i]] + [t.dims[i] for t in res.term_modules]
            ranks = [f.rank(a) for a in seq]
            if ranks[0] != dims[0]:
                return False
            for k in range(1, len(dims)):
                out = ranks[k] if k < len(ranks) else 0
                if (full or k < len(dims) - 1) and ranks[k - 1] + out != dims[k]:
                    return False
        for a, b in zip(seq, seq[1:]):
            if not f.is_zero(f.matmul(b, a)):
                return False
    return True


def dominates(res: IndicatorResolution, pi) -> bool:
    """Every region of every term is a union of fibers of π."""
    images = np.array(pi.images)
    for t in res.terms:
        for r in t:
            for j in set(images.tolist()):
                fib = images == j
                if r.mask[fib].any() and not r.mask[fib].all():
                    return False
    return True
