"""Seeded random instances: posets, regions, modules, filtrations.

Modules are produced as images of random fringe or flange maps, which makes
them valid modules by construction and keeps their dimensions small.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from .field import QQ, Field
from .lattice import FinDetRegion, FlatLabel, InjLabel, all_faces, meeting_degree
from .module import EncodedModule, FinDetModule, ModuleMorphism, grid_poset, image
from .poset import (FinitePoset, PosetMorphism, PosetRegion, downset_cogenerated, pi0, transitive_closure,
                    upset_generated)


def rng_of(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# posets


def random_poset(n: int, seed=0, p: float = 0.3) -> FinitePoset:
    """Closure of a random naturally labelled DAG on 0..n-1."""
    rng = rng_of(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return transitive_closure(range(n), pairs)


def _canonical(leq: np.ndarray) -> bytes:
    n = len(leq)
    best = None
    for perm in itertools.permutations(range(n)):
        key = leq[np.ix_(perm, perm)].tobytes()
        if best is None or key < best:
            best = key
    return best


def all_posets(n: int) -> list:
    """One representative of every isomorphism class of posets on n elements."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen, out = set(), []
    for bits in range(1 << len(pairs)):
        leq = np.eye(n, dtype=bool)
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                leq[i, j] = True
        closed = leq.copy()
        for k in range(n):
            closed |= closed[:, [k]] & closed[[k], :]
        if (closed != leq).any():
            continue
        key = _canonical(leq)
        if key not in seen:
            seen.add(key)
            out.append(FinitePoset(range(n), leq, check=False))
    return out


def random_upset(poset: FinitePoset, seed=0, k: int = None) -> PosetRegion:
    rng = rng_of(seed)
    k = rng.randint(0, max(1, len(poset) // 2)) if k is None else k
    return upset_generated(poset, rng.sample(list(poset.elements), min(k, len(poset))))


def random_downset(poset: FinitePoset, seed=0, k: int = None) -> PosetRegion:
    rng = rng_of(seed)
    k = rng.randint(0, max(1, len(poset) // 2)) if k is None else k
    return downset_cogenerated(poset, rng.sample(list(poset.elements), min(k, len(poset))))


# modules on finite posets


def _scalar(rng, f: Field):
    c = 0
    while c == 0:
        c = rng.randint(-3, 3)
    return f(c)


def random_fringe_data(poset: FinitePoset, seed=0, rows: int = 3, cols: int = 3, f: Field = QQ):
    """Random nonempty upsets and downsets with scalars on connected overlaps."""
    rng = rng_of(seed)
    ups = []
    while len(ups) < rows:
        u = random_upset(poset, rng, rng.randint(1, 2))
        if u:
            ups.append(u)
    downs = []
    while len(downs) < cols:
        d = random_downset(poset, rng, rng.randint(1, 2))
        if d:
            downs.append(d)
    entries = f.zeros(rows, cols)
    for p, q in itertools.product(range(rows), range(cols)):
        meet = ups[p] & downs[q]
        if meet and len(pi0(meet)) == 1 and rng.random() < 0.7:
            entries[p, q] = _scalar(rng, f)
    return ups, downs, entries


def random_module(poset: FinitePoset, seed=0, rows: int = 3, cols: int = 3, f: Field = QQ) -> EncodedModule:
    """Image of a random fringe map."""
    from .fringe import materialize
    ups, downs, entries = random_fringe_data(poset, seed, rows, cols, f)
    im, _, _ = image(materialize(ups, downs, entries, f))
    return EncodedModule(poset, im.dims, im.maps, f, check=False)


def random_encoded(seed=0, n_q: int = 7, n_p: int = 4, f: Field = QQ):
    """(M, π, H): M is the pullback of a random H along a random poset map."""
    from .module import pullback
    rng = rng_of(seed)
    p = random_poset(n_p, rng, 0.4)
    h = random_module(p, rng, 2, 2, f)
    q = random_poset(n_q, rng, 0.3)
    # a poset map: send each element above the images of everything below it
    images = [0] * n_q
    leq_p = p.leq
    for j in q.topological_order():
        below = [images[i] for i in range(n_q) if q.leq[i, j] and i != j]
        cands = [x for x in range(n_p) if all(leq_p[b, x] for b in below)]
        images[j] = rng.choice(cands) if cands else None
        if images[j] is None:
            return random_encoded(rng.random(), n_q, n_p, f)
    pi = PosetMorphism(q, p, tuple(images))
    return pullback(h, pi), pi, h


def label_signature_partition(regions, size: int) -> list:
    """Blocks of elements with the same membership in every region."""
    from .encoding import partition_from_labels
    sig = np.stack([np.asarray(r.mask if hasattr(r, "mask") else r, dtype=bool).reshape(-1) for r in regions], axis=1) \
        if regions else np.zeros((size, 0), dtype=bool)
    return partition_from_labels([row.tobytes() for row in sig])


# boxed Z^n modules


def random_flat_label(lo, hi, rng, tau=None) -> FlatLabel:
    n = len(lo)
    tau = tuple(k for k in range(n) if rng.random() < 0.2) if tau is None else tau
    b = tuple(rng.randint(lo[k] + 1, hi[k]) for k in range(n))
    return FlatLabel(b, tau)


def random_inj_label(lo, hi, rng, tau=None) -> InjLabel:
    n = len(lo)
    tau = tuple(k for k in range(n) if rng.random() < 0.2) if tau is None else tau
    b = tuple(rng.randint(lo[k], hi[k] - 1) for k in range(n))
    return InjLabel(b, tau)


def random_findet(n: int = 2, size: int = 4, seed=0, rows: int = 3, cols: int = 3, f: Field = QQ,
                  labels: bool = False):
    """Image of a random flange on the box [0, size-1]^n.

    With ``labels`` the flat and injective labels are returned as well.
    """
    from .homalg import _label_sum_module
    rng = rng_of(seed)
    lo, hi = tuple([0] * n), tuple([size - 1] * n)
    flats = [random_flat_label(lo, hi, rng) for _ in range(rows)]
    injs = [random_inj_label(lo, hi, rng) for _ in range(cols)]
    entries = f.zeros(rows, cols)
    for p, q in itertools.product(range(rows), range(cols)):
        if meeting_degree(flats[p], injs[q], lo, hi) is not None and rng.random() < 0.75:
            entries[p, q] = _scalar(rng, f)
    src = _label_sum_module(flats, lo, hi, f)
    tgt = _label_sum_module(injs, lo, hi, f)
    comps = []
    for q in src.cells():
        s = [j for j, lab in enumerate(flats) if q in lab]
        t = [j for j, lab in enumerate(injs) if q in lab]
        c = f.zeros(len(t), len(s))
        for a, p_ in enumerate(s):
            for b, r in enumerate(t):
                c[b, a] = entries[p_, r]
        comps.append(c)
    phi = ModuleMorphism(src, tgt, comps, check=False)
    im, _, _ = image(phi)
    m = FinDetModule(lo, hi, im.dims, im.maps, f, check=False, poset=im.poset)
    if labels:
        return m, flats, injs, phi
    return m


def random_downset_box(n: int, size: int, seed=0, gens: int = 3) -> FinDetRegion:
    """Union of random indecomposable injective downsets, on a box with margin."""
    rng = rng_of(seed)
    lo, hi = tuple([-1] * n), tuple([size] * n)
    labs = [random_inj_label(lo, hi, rng, tau=tuple(k for k in range(n) if rng.random() < 0.35))
            for _ in range(gens)]
    mask = np.zeros(tuple(b - a + 1 for a, b in zip(lo, hi)), dtype=bool)
    for lab in labs:
        mask |= lab.region(lo, hi).mask
    return FinDetRegion(lo, hi, mask, "downset")


def random_short_exact(n: int = 2, size: int = 4, seed=0, f: Field = QQ):
    """0 -> A -> B -> C -> 0 as (A, B, C, A->B, B->C) from a random flange map."""
    from .module import cokernel, kernel
    rng = rng_of(seed)
    m, flats, injs, phi = random_findet(n, size, rng, rng.randint(1, 3), rng.randint(1, 3), f, labels=True)
    if rng.random() < 0.5:
        a, inc = kernel(phi)
        im, onto, _ = image(phi)
        return a, phi.source, im, inc, onto
    im, _, into = image(phi)
    c, proj = cokernel(phi)
    return im, phi.target, c, into, proj


# filtrations


def random_filtration(seed=0, n: int = 2, vertices: int = 6, max_simplices: int = 40, max_deg: int = 4,
                      p_edge: float = 0.45, p_tri: float = 0.5, p_bicritical: float = 0.15):
    from .filtration import MultiFiltration
    rng = rng_of(seed)

    def deg():
        return tuple(rng.randint(0, max_deg) for _ in range(n))

    def above(faces):
        # one entry per choice of face entries, joined and nudged upward
        picks = [rng.choice(entries[fc]) for fc in faces]
        join = tuple(max(x) for x in zip(*picks))
        return tuple(x + (rng.random() < 0.4) for x in join)

    entries = {}
    simplices = []
    for v in range(vertices):
        e = [deg()]
        if rng.random() < p_bicritical:
            e.append(deg())
        entries[(v,)] = e
        simplices.append(((v,), e))
    edges = [e for e in itertools.combinations(range(vertices), 2) if rng.random() < p_edge]
    for e in edges:
        if len(simplices) >= max_simplices:
            break
        ent = [above([(e[0],), (e[1],)])]
        if rng.random() < p_bicritical:
            ent.append(above([(e[0],), (e[1],)]))
        entries[e] = ent
        simplices.append((e, ent))
    for t in itertools.combinations(range(vertices), 3):
        if len(simplices) >= max_simplices:
            break
        faces = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
        if all(fc in entries for fc in faces) and rng.random() < p_tri:
            ent = [above(faces)]
            entries[t] = ent
            simplices.append((t, ent))
    return MultiFiltration(n, [(list(s), e) for s, e in simplices])


def faces_of(n: int):
    return all_faces(n)


def grid(lo, hi):
    return grid_poset(lo, hi)
