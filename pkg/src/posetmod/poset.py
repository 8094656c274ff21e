"""Finite posets, order-preserving maps, regions, and indicator Hom spaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class CycleError(ValueError):
    """Raised when a relation that should be acyclic has a cycle."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle: " + " -> ".join(map(str, self.cycle)))


def sort_ids(ids):
    ids = list(ids)
    try:
        return sorted(ids)
    except TypeError:
        return sorted(ids, key=lambda x: (type(x).__name__, repr(x)))


def _closure(adj: np.ndarray) -> np.ndarray:
    reach = adj.copy()
    np.fill_diagonal(reach, True)
    for k in range(len(reach)):
        reach |= reach[:, k:k + 1] & reach[k:k + 1, :]
    return reach


def _find_cycle(adj: np.ndarray):
    n = len(adj)
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(np.flatnonzero(adj[root])))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif w == v:
                return [v, v]
            elif color[w] == 0:
                color[w] = 1
                parent[w] = v
                stack.append((w, iter(np.flatnonzero(adj[w]))))
            elif color[w] == 1:
                cyc = [v]
                while cyc[-1] != w:
                    cyc.append(parent[cyc[-1]])
                return cyc[::-1] + [w]
    return None


class FinitePoset:
    """A finite poset stored as a dense boolean relation.

    ``leq[i, j]`` is true when ``elements[i] <= elements[j]``.  Elements are
    sorted once at construction and every output follows that order.
    """

    def __init__(self, elements, leq, check: bool = True):
        elements = list(elements)
        leq = np.asarray(leq, dtype=bool)
        srt = sort_ids(elements)
        pos = {e: i for i, e in enumerate(elements)}
        if len(pos) != len(elements):
            raise ValueError("duplicate elements")
        perm = [pos[e] for e in srt]
        self.elements = tuple(srt)
        self.leq = leq[np.ix_(perm, perm)] if perm else np.zeros((0, 0), dtype=bool)
        self.leq.setflags(write=False)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self._covers = None
        if check:
            self._check()

    def _check(self):
        r = self.leq
        n = len(r)
        if not r.diagonal().all():
            raise ValueError("relation is not reflexive")
        both = r & r.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = map(int, np.argwhere(both)[0])
            raise CycleError([self.elements[i], self.elements[j], self.elements[i]])
        if n and (_closure(r) != r).any():
            raise ValueError("relation is not transitive")

    @classmethod
    def from_relations(cls, elements, pairs) -> "FinitePoset":
        """Poset generated by ``a <= b`` for each pair; pairs may be covers."""
        return transitive_closure(elements, pairs)

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls(range(n), np.triu(np.ones((n, n), dtype=bool)), check=False)

    @classmethod
    def antichain(cls, elements) -> "FinitePoset":
        elements = list(elements)
        return cls(elements, np.eye(len(elements), dtype=bool), check=False)

    @classmethod
    def grid(cls, lo, hi) -> "FinitePoset":
        """The box [lo, hi] in Z^n with the componentwise order."""
        pts = list(itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]))
        arr = np.array(pts, dtype=int).reshape(len(pts), len(lo))
        leq = (arr[:, None, :] <= arr[None, :, :]).all(axis=2)
        p = cls(pts, leq, check=False)
        n = len(lo)
        shape = [b - a + 1 for a, b in zip(lo, hi)]
        covers = []
        for i, q in enumerate(p.elements):
            for ax in range(n):
                if q[ax] < hi[ax]:
                    covers.append((i, i + int(np.prod(shape[ax + 1:]))))
        p._covers = sorted(covers)
        return p

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (isinstance(other, FinitePoset) and self.elements == other.elements
                and bool((self.leq == other.leq).all()))

    def __hash__(self):
        return hash((self.elements, self.leq.tobytes()))

    def __repr__(self):
        return f"FinitePoset({len(self)} elements, {len(self.covers)} covers)"

    def le(self, a, b) -> bool:
        return bool(self.leq[self.index[a], self.index[b]])

    @property
    def covers(self):
        """Cover pairs (i, j), i.e. the transitive reduction, as index pairs."""
        if self._covers is None:
            strict = self.leq.copy()
            np.fill_diagonal(strict, False)
            s = strict.astype(np.float32)
            two = (s @ s) > 0
            self._covers = [tuple(map(int, x)) for x in np.argwhere(strict & ~two)]
        return self._covers

    def cover_ids(self):
        return [(self.elements[i], self.elements[j]) for i, j in self.covers]

    def upper_covers(self, i):
        return [j for a, j in self.covers if a == i]

    def lower_covers(self, i):
        return [a for a, j in self.covers if j == i]

    def topological_order(self):
        """Indices sorted so that every element follows everything below it."""
        below = self.leq.sum(axis=0)
        return sorted(range(len(self)), key=lambda i: (int(below[i]), i))

    def minimal(self):
        return [i for i in range(len(self)) if self.leq[:, i].sum() == 1]

    def maximal(self):
        return [i for i in range(len(self)) if self.leq[i].sum() == 1]

    def is_connected(self) -> bool:
        if not len(self):
            return False
        return connected_components(csr_matrix(self.leq), directed=False)[0] == 1

    def mask(self, ids) -> np.ndarray:
        m = np.zeros(len(self), dtype=bool)
        for e in ids:
            m[self.index[e]] = True
        return m

    def region(self, ids, kind: str) -> "PosetRegion":
        return PosetRegion(self, self.mask(ids), kind)

    def induced(self, ids) -> "FinitePoset":
        idx = [self.index[e] for e in ids]
        return FinitePoset([self.elements[i] for i in idx], self.leq[np.ix_(idx, idx)], check=False)


def transitive_closure(elements, pairs) -> FinitePoset:
    """Smallest partial order containing the given relation pairs.

    Raises CycleError carrying a witness cycle when the relation is cyclic.
    """
    elements = sort_ids(elements)
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    adj = np.zeros((n, n), dtype=bool)
    for a, b in pairs:
        if a != b:
            adj[index[a], index[b]] = True
    cyc = _find_cycle(adj)
    if cyc is not None:
        raise CycleError([elements[i] for i in cyc])
    return FinitePoset(elements, _closure(adj), check=False)


@dataclass(frozen=True)
class PosetMorphism:
    """Order-preserving map given by target indices, one per source element."""

    source: FinitePoset
    target: FinitePoset
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if len(self.images) != len(self.source):
            raise ValueError("map must send every source element somewhere")
        img = np.array(self.images, dtype=int)
        if len(img):
            bad = self.source.leq & ~self.target.leq[np.ix_(img, img)]
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                e = self.source.elements
                raise ValueError(f"not order-preserving: {e[i]} <= {e[j]} but images are not comparable")

    @classmethod
    def from_dict(cls, source, target, mapping) -> "PosetMorphism":
        return cls(source, target, tuple(target.index[mapping[e]] for e in source.elements))

    def __call__(self, e):
        return self.target.elements[self.images[self.source.index[e]]]

    def fiber(self, j: int):
        return [i for i, x in enumerate(self.images) if x == j]

    def compose(self, after: "PosetMorphism") -> "PosetMorphism":
        """``after`` applied after ``self``."""
        return PosetMorphism(self.source, after.target, tuple(after.images[i] for i in self.images))


KINDS = ("upset", "downset", "interval", "set")


class PosetRegion:
    """A subset of a finite poset tagged with its closure type."""

    def __init__(self, poset: FinitePoset, mask, kind: str = "set", check: bool = True):
        if kind not in KINDS:
            raise ValueError(f"unknown region kind {kind!r}")
        self.poset = poset
        self.mask = np.asarray(mask, dtype=bool).copy()
        self.mask.setflags(write=False)
        self.kind = kind
        if check:
            self._check()

    def _check(self):
        m, leq = self.mask, self.poset.leq
        up_ok = not (leq[m] & ~m).any()
        down_ok = not (leq[:, m] & ~m[:, None]).any()
        if self.kind == "upset" and not up_ok:
            raise ValueError("members are not closed upward")
        if self.kind == "downset" and not down_ok:
            raise ValueError("members are not closed downward")
        if self.kind == "interval" and not is_convex(self.poset, m):
            raise ValueError("members do not form an interval")

    def __len__(self):
        return int(self.mask.sum())

    def __bool__(self):
        return bool(self.mask.any())

    def __eq__(self, other):
        if not isinstance(other, PosetRegion):
            return NotImplemented
        same = self.poset is other.poset or self.poset == other.poset
        return same and bool((self.mask == other.mask).all())

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self):
        return f"PosetRegion({self.kind}, {list(self.members)})"

    def __contains__(self, e):
        return bool(self.mask[self.poset.index[e]])

    @property
    def indices(self):
        return [int(i) for i in np.flatnonzero(self.mask)]

    @property
    def members(self):
        return [self.poset.elements[i] for i in self.indices]

    def complement(self) -> "PosetRegion":
        flip = {"upset": "downset", "downset": "upset"}.get(self.kind, "set")
        return PosetRegion(self.poset, ~self.mask, flip, check=False)

    def __and__(self, other) -> "PosetRegion":
        _same_carrier(self, other)
        kinds = {self.kind, other.kind}
        if len(kinds) == 1 and self.kind in ("upset", "downset"):
            kind = self.kind
        elif kinds <= {"upset", "downset", "interval"}:
            kind = "interval"
        else:
            kind = "set"
        return PosetRegion(self.poset, self.mask & other.mask, kind, check=False)

    def __or__(self, other) -> "PosetRegion":
        _same_carrier(self, other)
        kind = self.kind if self.kind == other.kind and self.kind in ("upset", "downset") else "set"
        return PosetRegion(self.poset, self.mask | other.mask, kind, check=False)

    def issubset(self, other) -> bool:
        return not (self.mask & ~other.mask).any()


def _same_carrier(a, b):
    if a.poset is not b.poset and a.poset != b.poset:
        raise ValueError("regions live on different posets")


def is_upset(poset: FinitePoset, mask) -> bool:
    mask = np.asarray(mask, dtype=bool)
    return not (poset.leq[mask] & ~mask).any()


def is_downset(poset: FinitePoset, mask) -> bool:
    mask = np.asarray(mask, dtype=bool)
    return not (poset.leq[:, mask] & ~mask[:, None]).any()


def is_convex(poset: FinitePoset, mask) -> bool:
    mask = np.asarray(mask, dtype=bool)
    up = poset.leq[mask].any(axis=0)
    down = poset.leq[:, mask].any(axis=1)
    return bool(((up & down) == mask).all())


def upset_generated(poset: FinitePoset, ids) -> PosetRegion:
    idx = [poset.index[e] for e in ids]
    mask = poset.leq[idx].any(axis=0) if idx else np.zeros(len(poset), dtype=bool)
    return PosetRegion(poset, mask, "upset", check=False)


def downset_cogenerated(poset: FinitePoset, ids) -> PosetRegion:
    idx = [poset.index[e] for e in ids]
    mask = poset.leq[:, idx].any(axis=1) if idx else np.zeros(len(poset), dtype=bool)
    return PosetRegion(poset, mask, "downset", check=False)


def pi0(region: PosetRegion) -> list:
    """Connected components of a region under zig-zag comparability.

    Components come back ordered by their least element index; each keeps the
    region's kind, since a component of an upset, downset or interval is
    again one.
    """
    idx = region.indices
    if not idx:
        return []
    sub = region.poset.leq[np.ix_(idx, idx)]
    _, labels = connected_components(csr_matrix(sub), directed=False)
    comps = {}
    for i, lab in zip(idx, labels):
        comps.setdefault(int(lab), []).append(i)
    out = []
    for members in sorted(comps.values(), key=min):
        m = np.zeros(len(region.poset), dtype=bool)
        m[members] = True
        out.append(PosetRegion(region.poset, m, region.kind, check=False))
    return out


@dataclass(frozen=True)
class IndicatorHom:
    """Basis homomorphism between indicator modules: 1 on ``support``, 0 elsewhere."""

    source: PosetRegion
    target: PosetRegion
    support: PosetRegion


def hom_indicator(upset: PosetRegion, downset: PosetRegion) -> list:
    """Basis of Hom(k[U], k[D]): one map per component of U ∩ D."""
    _same_carrier(upset, downset)
    if upset.kind != "upset" or downset.kind != "downset":
        raise ValueError("expected an upset and a downset")
    return [IndicatorHom(upset, downset, c) for c in pi0(upset & downset)]


def hom_upset_upset(source: PosetRegion, target: PosetRegion) -> list:
    """Basis of Hom(k[U'], k[U]): components of U' lying inside U."""
    _same_carrier(source, target)
    return [IndicatorHom(source, target, c) for c in pi0(source) if c.issubset(target)]


def hom_downset_downset(source: PosetRegion, target: PosetRegion) -> list:
    """Basis of Hom(k[D], k[D']): components of D' lying inside D."""
    _same_carrier(source, target)
    return [IndicatorHom(source, target, c) for c in pi0(target) if c.issubset(source)]


def _embeds(poset: FinitePoset, coords: np.ndarray) -> bool:
    if coords.shape[1] == 0:
        return len(poset) <= 1
    le = (coords[:, None, :] <= coords[None, :, :]).all(axis=2)
    return bool((le == poset.leq).all())


def embed_into_grid(poset: FinitePoset):
    """Order embedding of a finite poset into Z^n.

    Start from ι(q)_p = [p <= q], then greedily drop coordinates and merge
    pairs of coordinates by summing, keeping the embedding property.  The
    result is deterministic but not of minimal dimension.  Returns
    ``(n, coords)`` with ``coords`` an integer array of shape (|P|, n).
    """
    coords = poset.leq.T.astype(int)
    k = 0
    while k < coords.shape[1] and coords.shape[1] > 1:
        trial = np.delete(coords, k, axis=1)
        if _embeds(poset, trial):
            coords = trial
        else:
            k += 1
    merged = True
    while merged and coords.shape[1] > 1:
        merged = False
        for a, b in itertools.combinations(range(coords.shape[1]), 2):
            trial = np.delete(coords, b, axis=1)
            trial[:, a] = coords[:, a] + coords[:, b]
            if _embeds(poset, trial):
                coords = trial
                merged = True
                break
    if len(coords):
        coords = coords - coords.min(axis=0)
    return coords.shape[1], coords
