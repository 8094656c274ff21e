"""Constant subdivisions, uptight regions and finite encodings of poset modules.

A partition is given as a list of blocks, each a list of element indices of
the carrier.  Blocks are renumbered by their least index everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .poset import (CycleError, FinitePoset, PosetMorphism, PosetRegion, _closure,
                    _find_cycle, downset_cogenerated, upset_generated)
from .module import EncodedModule, ModuleMorphism, pullback, verify_isomorphism


class SubdivisionError(ValueError):
    """A partition that is not a constant subdivision, with a witness pair."""

    def __init__(self, witness, reason):
        self.witness = witness
        self.reason = reason
        super().__init__(f"{reason}: {witness}")


def normalize_partition(n: int, partition) -> list:
    blocks = [sorted(int(i) for i in b) for b in partition if len(b)]
    seen = sorted(i for b in blocks for i in b)
    if seen != list(range(n)):
        raise ValueError("partition must cover every element exactly once")
    return sorted(blocks, key=lambda b: b[0])


def partition_from_labels(labels) -> list:
    """Blocks of equal labels, ordered by least index."""
    out = {}
    for i, lab in enumerate(labels):
        out.setdefault(lab, []).append(i)
    return sorted(out.values(), key=lambda b: b[0])


@dataclass
class ConstantSubdivision:
    """A certified partition: frames M_i -> V_I and block transitions V_I -> V_J."""

    module: EncodedModule
    blocks: list
    region_of: tuple
    dims: tuple
    frames: list
    transitions: dict

    @property
    def carrier(self) -> FinitePoset:
        return self.module.poset

    def __len__(self):
        return len(self.blocks)


def _components(poset: FinitePoset, block):
    sub = poset.leq[np.ix_(block, block)]
    _, labels = connected_components(csr_matrix(sub), directed=False)
    comps = {}
    for i, lab in zip(block, labels):
        comps.setdefault(int(lab), []).append(i)
    return sorted(comps.values(), key=lambda c: c[0])


def verify_constant_subdivision(m: EncodedModule, partition) -> ConstantSubdivision:
    """Certify a partition as a constant subdivision or raise SubdivisionError.

    Frames are propagated through each zig-zag component of a block along
    invertible structure maps.  Components of one block have independent
    frames up to a change of basis; those are aligned through invertible
    transitions to other blocks, and components left undetermined keep the
    identity.  Every comparable pair is then checked, so a returned
    certificate is always valid; a rejection can in principle come from an
    unlucky alignment when only singular transitions link two components.
    Transitions from a region to itself are the identity.
    """
    f = m.field
    p = m.poset
    leq = p.leq
    blocks = normalize_partition(len(p), partition)
    region_of = np.empty(len(p), dtype=int)
    for r, b in enumerate(blocks):
        region_of[b] = r
    dims = []
    for b in blocks:
        d = m.dims[b[0]]
        for i in b:
            if m.dims[i] != d:
                raise SubdivisionError((p.elements[b[0]], p.elements[i]), "dimensions differ inside a region")
        dims.append(d)

    # frames inside each component: alpha_j T(i, j) = alpha_i
    frames = [None] * len(p)
    comp_of = np.empty(len(p), dtype=int)
    comps = []
    for b in blocks:
        for c in _components(p, b):
            cid = len(comps)
            comps.append(c)
            comp_of[c] = cid
            frames[c[0]] = f.eye(m.dims[c[0]])
            todo = [c[0]]
            inside = set(c)
            while todo:
                i = todo.pop()
                for j in np.flatnonzero(leq[i] | leq[:, i]):
                    j = int(j)
                    if j not in inside or frames[j] is not None:
                        continue
                    lo, hi = (i, j) if leq[i, j] else (j, i)
                    t = m.transition(lo, hi)
                    if not f.is_invertible(t):
                        raise SubdivisionError((p.elements[lo], p.elements[hi]),
                                               "structure map inside a region is not invertible")
                    frames[j] = f.matmul(frames[i], f.inverse(t)) if lo == i else f.matmul(frames[i], t)
                    todo.append(j)
            for a in c:
                for b2 in c:
                    if a != b2 and leq[a, b2]:
                        lhs = f.matmul(frames[b2], m.transition(a, b2))
                        if not f.equal(lhs, frames[a]):
                            raise SubdivisionError((p.elements[a], p.elements[b2]), "monodromy inside a region")

    # one composite per ordered pair of components
    inv = [f.inverse(a) for a in frames]
    comp_maps = {}
    for i, j in zip(*np.nonzero(leq)):
        i, j = int(i), int(j)
        ci, cj = int(comp_of[i]), int(comp_of[j])
        if ci == cj:
            continue
        a = f.chain(frames[j], m.transition(i, j), inv[i])
        key = (ci, cj)
        if key in comp_maps:
            if not f.equal(comp_maps[key][0], a):
                i0, j0 = comp_maps[key][1]
                raise SubdivisionError((p.elements[i0], p.elements[j0], p.elements[i], p.elements[j]),
                                       "monodromy between regions")
        else:
            comp_maps[key] = (a, (i, j))

    # align component gauges g_c so that g_d A_cd g_c^-1 depends only on blocks
    creg = [int(region_of[c[0]]) for c in comps]
    gauge = [None] * len(comps)
    # i <= i is a comparable pair, so within a region the composite is the identity
    trans = {(r, r): f.eye(d) for r, d in enumerate(dims)}
    by_pair = {}
    for (ci, cj), (a, _) in comp_maps.items():
        by_pair.setdefault((creg[ci], creg[cj]), []).append((ci, cj, a))
    while any(g is None for g in gauge):
        start = next(k for k, g in enumerate(gauge) if g is None)
        gauge[start] = f.eye(dims[creg[start]])
        changed = True
        while changed:
            changed = False
            for key, items in by_pair.items():
                if key not in trans:
                    for ci, cj, a in items:
                        if gauge[ci] is not None and gauge[cj] is not None:
                            trans[key] = f.chain(gauge[cj], a, f.inverse(gauge[ci]))
                            changed = True
                            break
                if key not in trans:
                    continue
                x = trans[key]
                for ci, cj, a in items:
                    known_i, known_j = gauge[ci] is not None, gauge[cj] is not None
                    if known_i == known_j or not f.is_invertible(a):
                        continue
                    if known_i:
                        gauge[cj] = f.chain(x, gauge[ci], f.inverse(a))
                    else:
                        gauge[ci] = f.chain(f.inverse(x), gauge[cj], a)
                    changed = True
    for key, items in by_pair.items():
        for ci, cj, a in items:
            got = f.chain(gauge[cj], a, f.inverse(gauge[ci]))
            if key not in trans:
                trans[key] = got
            elif not f.equal(got, trans[key]):
                i, j = comp_maps[(ci, cj)][1]
                raise SubdivisionError((p.elements[i], p.elements[j]), "monodromy between regions")
    frames = [f.matmul(gauge[comp_of[i]], frames[i]) for i in range(len(p))]
    return ConstantSubdivision(m, blocks, tuple(int(x) for x in region_of), tuple(dims), frames, trans)


def is_constant_subdivision(m: EncodedModule, partition):
    """(True, None) or (False, witness)."""
    try:
        verify_constant_subdivision(m, partition)
    except SubdivisionError as e:
        return False, e
    return True, None


def isotypic_partition(m: EncodedModule) -> list:
    """Blocks joined whenever a structure map between them is an isomorphism."""
    f = m.field
    p = m.poset
    parent = list(range(len(p)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(*np.nonzero(p.leq)):
        i, j = int(i), int(j)
        if i != j and f.is_invertible(m.transition(i, j)):
            parent[find(i)] = find(j)
    return partition_from_labels([find(i) for i in range(len(p))])


# uptight regions


def constant_upsets(s: ConstantSubdivision) -> list:
    """U_I and the complement of D_I for every region I, without repeats."""
    p = s.carrier
    out, seen = [], set()
    for b in s.blocks:
        ids = [p.elements[i] for i in b]
        for u in (upset_generated(p, ids), downset_cogenerated(p, ids).complement()):
            key = u.mask.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(u)
    return out


def uptight_regions(carrier: FinitePoset, upsets) -> list:
    """Fibers of a -> {U : a in U}, ordered by least element index."""
    if not upsets:
        return [list(range(len(carrier)))]
    sig = np.stack([np.asarray(u.mask if isinstance(u, PosetRegion) else u, dtype=bool) for u in upsets], axis=1)
    return partition_from_labels([row.tobytes() for row in sig])


@dataclass
class UptightPoset:
    blocks: list
    region_of: tuple
    witness: np.ndarray
    poset: FinitePoset

    def projection(self, carrier: FinitePoset) -> PosetMorphism:
        return PosetMorphism(carrier, self.poset, self.region_of)


def uptight_poset(blocks, carrier: FinitePoset) -> UptightPoset:
    """Regions ordered by the transitive closure of 'some a in A is below some b in B'."""
    blocks = normalize_partition(len(carrier), blocks)
    k = len(blocks)
    ind = np.zeros((k, len(carrier)), dtype=bool)
    for r, b in enumerate(blocks):
        ind[r, b] = True
    w = (ind.astype(np.int64) @ carrier.leq.astype(np.int64) @ ind.T.astype(np.int64)) > 0
    strict = w.copy()
    np.fill_diagonal(strict, False)
    cyc = _find_cycle(strict)
    if cyc is not None:
        raise CycleError(cyc)
    np.fill_diagonal(w, True)
    region_of = np.empty(len(carrier), dtype=int)
    for r, b in enumerate(blocks):
        region_of[b] = r
    poset = FinitePoset(range(k), _closure(w), check=False)
    return UptightPoset(blocks, tuple(int(x) for x in region_of), w, poset)


@dataclass
class Encoding:
    """π : Q -> P with a P-module H and an isomorphism π*H -> M."""

    pi: PosetMorphism
    H: EncodedModule
    witness: ModuleMorphism
    uptight: UptightPoset = None

    def pullback(self) -> EncodedModule:
        return pullback(self.H, self.pi)

    def verify(self) -> bool:
        return verify_isomorphism(self.witness)


def encode_from_frames(m: EncodedModule, up: UptightPoset, frames) -> Encoding:
    """Module on the uptight poset read off per-element frames M_a -> V_A."""
    f = m.field
    q = up.poset
    reps = [b[0] for b in up.blocks]
    dims = [m.dims[r] for r in reps]
    leq = m.poset.leq
    maps = {}
    for a_, b_ in q.covers:
        pair = next(((i, j) for i in up.blocks[a_] for j in up.blocks[b_] if leq[i, j]), None)
        if pair is None:
            raise RuntimeError(f"cover {a_} < {b_} of the uptight poset has no witness pair")
        i, j = pair
        maps[(a_, b_)] = f.chain(frames[j], m.transition(i, j), f.inverse(frames[i]))
    h = EncodedModule(q, dims, maps, f, check=True)
    pi = up.projection(m.poset)
    pb = pullback(h, pi)
    wit = ModuleMorphism(pb, m, [f.inverse(a) for a in frames], check=True)
    return Encoding(pi, h, wit, up)


def uptight_encoding(m: EncodedModule, s: ConstantSubdivision = None) -> Encoding:
    """Encode M by the uptight poset of the constant upsets of S.

    Each uptight region A gets the space of the constant region I0 holding
    its least element; another region J meeting A is identified with I0 by
    the block transition V_I0 -> V_J, which is invertible there.  The
    returned witness π*H -> M is checked to be a module isomorphism.
    """
    f = m.field
    if s is None:
        s = verify_constant_subdivision(m, [[i] for i in range(len(m.poset))])
    ups = constant_upsets(s)
    blocks = uptight_regions(m.poset, ups)
    up = uptight_poset(blocks, m.poset)
    frames = [None] * len(m.poset)
    for b in up.blocks:
        r0 = s.region_of[b[0]]
        for a in b:
            r = s.region_of[a]
            if r == r0:
                frames[a] = s.frames[a]
                continue
            x = s.transitions.get((r0, r))
            if x is not None and f.is_invertible(x):
                frames[a] = f.matmul(f.inverse(x), s.frames[a])
                continue
            x = s.transitions.get((r, r0))
            if x is None or not f.is_invertible(x):
                raise SubdivisionError((m.poset.elements[b[0]], m.poset.elements[a]),
                                       "regions meeting one uptight region are not identified")
            frames[a] = f.matmul(x, s.frames[a])
    return encode_from_frames(m, up, frames)


def identity_encoding(m: EncodedModule) -> Encoding:
    p = m.poset
    pi = PosetMorphism(p, p, tuple(range(len(p))))
    wit = ModuleMorphism(m, m, [m.field.eye(d) for d in m.dims], check=False)
    return Encoding(pi, m, wit)
