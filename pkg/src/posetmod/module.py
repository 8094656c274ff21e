"""Poset modules as finite linear-algebra data.

An ``EncodedModule`` is a vector space per element of a finite poset and a
matrix per cover.  A ``FinDetModule`` is the same thing on a box of Z^n,
read as a Z^n-module whose structure maps are identities once a coordinate
leaves the box (the value at q is the value at clamp(q)).
"""

from __future__ import annotations

import itertools

import numpy as np

from .field import QQ, Field, block_diag
from .lattice import all_faces
from .poset import FinitePoset, PosetMorphism, PosetRegion


class CommutativityError(ValueError):
    def __init__(self, witness, msg="structure maps do not commute"):
        self.witness = witness
        super().__init__(f"{msg}: {witness}")


class EncodedModule:
    def __init__(self, poset: FinitePoset, dims, maps, field: Field = QQ, check: bool = True):
        self.poset = poset
        self.field = field
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != len(poset):
            raise ValueError("need one dimension per poset element")
        self.maps = {}
        for i, j in poset.covers:
            m = maps.get((i, j))
            shape = (self.dims[j], self.dims[i])
            if m is None:
                if shape[0] and shape[1]:
                    raise ValueError(f"missing map on cover {poset.elements[i]} < {poset.elements[j]}")
                m = field.zeros(*shape)
            m = np.asarray(m, dtype=object)
            if m.shape != shape:
                raise ValueError(f"map on cover {poset.elements[i]} < {poset.elements[j]} "
                                 f"has shape {m.shape}, expected {shape}")
            self.maps[(i, j)] = field.reduce(m)
        self._trans = {}
        self._up = {}
        for i, j in poset.covers:
            self._up.setdefault(i, []).append(j)
        if check:
            self.check()

    def with_data(self, dims, maps, check: bool = False):
        """A module of the same shape class on the same carrier."""
        return EncodedModule(self.poset, dims, maps, self.field, check=check)

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return not any(self.dims)

    def dim(self, e) -> int:
        return self.dims[self.poset.index[e]]

    def transition(self, i: int, j: int) -> np.ndarray:
        """Structure map from element i to element j (requires i <= j)."""
        if i == j:
            return self.field.eye(self.dims[i])
        key = (i, j)
        if key in self._trans:
            return self._trans[key]
        leq = self.poset.leq
        if not leq[i, j]:
            raise ValueError(f"{self.poset.elements[i]} is not below {self.poset.elements[j]}")
        if not self.dims[i] or not self.dims[j]:
            t = self.field.zeros(self.dims[j], self.dims[i])
        else:
            k = next(k for k in self._up[i] if leq[k, j])
            t = self.field.matmul(self.transition(k, j), self.maps[(i, k)])
        self._trans[key] = t
        return t

    def check(self):
        """Raise CommutativityError unless all cover paths agree."""
        f = self.field
        lower = {}
        for i, j in self.poset.covers:
            lower.setdefault(j, []).append(i)
        leq = self.poset.leq
        for j in self.poset.topological_order():
            cs = lower.get(j, [])
            if len(cs) < 2 or not self.dims[j]:
                continue
            for i in np.flatnonzero(leq[:, j]):
                i = int(i)
                if i == j or not self.dims[i]:
                    continue
                via = [c for c in cs if leq[i, c]]
                if len(via) < 2:
                    continue
                ref = f.matmul(self.maps[(via[0], j)], self.transition(i, via[0]))
                for c in via[1:]:
                    other = f.matmul(self.maps[(c, j)], self.transition(i, c))
                    if not f.equal(ref, other):
                        e = self.poset.elements
                        raise CommutativityError((e[i], e[via[0]], e[c], e[j]))

    def same_as(self, other) -> bool:
        if self.dims != other.dims or self.poset != other.poset:
            return False
        return all(self.field.equal(self.maps[k], other.maps[k]) for k in self.maps)


class FinDetModule(EncodedModule):
    """Finitely determined Z^n-module stored on the box [lo, hi]."""

    def __init__(self, lo, hi, dims, maps, field: Field = QQ, check: bool = True, poset=None):
        self.lo = tuple(int(x) for x in lo)
        self.hi = tuple(int(x) for x in hi)
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"bad box {self.lo}..{self.hi}")
        self.n = len(self.lo)
        self.shape = tuple(b - a + 1 for a, b in zip(self.lo, self.hi))
        self._strides = [int(np.prod(self.shape[ax + 1:])) for ax in range(self.n)]
        poset = poset if poset is not None else grid_poset(self.lo, self.hi)
        if isinstance(dims, dict):
            dims = [dims.get(q, 0) for q in poset.elements]
        dims = np.asarray(dims, dtype=int).reshape(-1)
        cover_maps = {}
        for key, m in maps.items():
            if isinstance(key[0], tuple):
                q, ax = key
                i = self.cell(q)
                cover_maps[(i, i + self._strides[ax])] = m
            else:
                cover_maps[key] = m
        super().__init__(poset, dims, cover_maps, field, check=False)
        if check:
            self.check()

    def with_data(self, dims, maps, check: bool = False):
        return FinDetModule(self.lo, self.hi, dims, maps, self.field, check=check, poset=self.poset)

    def __repr__(self):
        return f"FinDetModule(box={self.lo}..{self.hi}, total_dim={self.total_dim})"

    def clamp(self, q):
        return tuple(min(max(int(x), a), b) for x, a, b in zip(q, self.lo, self.hi))

    def cell(self, q) -> int:
        """Index of clamp(q) among the box cells."""
        q = self.clamp(q)
        return sum((x - a) * s for x, a, s in zip(q, self.lo, self._strides))

    def cells(self):
        return self.poset.elements

    def dim_at(self, q) -> int:
        return self.dims[self.cell(q)]

    def dim_array(self) -> np.ndarray:
        return np.array(self.dims, dtype=int).reshape(self.shape)

    def map_between(self, q, r) -> np.ndarray:
        """Structure map from degree q to degree r >= q, anywhere in Z^n."""
        if any(a > b for a, b in zip(q, r)):
            raise ValueError(f"{q} is not below {r}")
        return self.transition(self.cell(q), self.cell(r))

    def step(self, q, ax: int) -> np.ndarray:
        return self.map_between(q, tuple(x + (k == ax) for k, x in enumerate(q)))

    def raise_to_top(self, q, axes):
        """q with each coordinate in ``axes`` pushed to the top of the box."""
        return tuple(self.hi[k] if k in axes else x for k, x in enumerate(q))

    def check(self):
        f = self.field
        for i, q in enumerate(self.poset.elements):
            for a, b in itertools.combinations(range(self.n), 2):
                if q[a] >= self.hi[a] or q[b] >= self.hi[b]:
                    continue
                ia, ib = i + self._strides[a], i + self._strides[b]
                top = ia + self._strides[b]
                if not self.dims[top] or not self.dims[i]:
                    continue
                left = f.matmul(self.maps[(ia, top)], self.maps[(i, ia)])
                right = f.matmul(self.maps[(ib, top)], self.maps[(i, ib)])
                if not f.equal(left, right):
                    e = self.poset.elements
                    raise CommutativityError((e[i], e[ia], e[ib], e[top]))

    def resample(self, lo, hi) -> "FinDetModule":
        """The same Z^n-module stored on a different box.

        The new box must still contain every place where the module changes;
        enlarging is always safe.
        """
        grid = grid_poset(lo, hi)
        dims = [self.dim_at(q) for q in grid.elements]
        maps = {}
        for i, j in grid.covers:
            maps[(i, j)] = self.map_between(grid.elements[i], grid.elements[j])
        return FinDetModule(lo, hi, dims, maps, self.field, check=False, poset=grid)

    def enlarge(self, margin: int = 1) -> "FinDetModule":
        return self.resample([a - margin for a in self.lo], [b + margin for b in self.hi])


_GRIDS = {}


def grid_poset(lo, hi) -> FinitePoset:
    key = (tuple(lo), tuple(hi))
    if key not in _GRIDS:
        if len(_GRIDS) > 64:
            _GRIDS.clear()
        _GRIDS[key] = FinitePoset.grid(*key)
    return _GRIDS[key]


def zero_module(poset: FinitePoset, field: Field = QQ) -> EncodedModule:
    return EncodedModule(poset, [0] * len(poset), {}, field, check=False)


def constant_module(poset: FinitePoset, field: Field = QQ) -> EncodedModule:
    return indicator_module(PosetRegion(poset, np.ones(len(poset), dtype=bool), "upset"), field)


def indicator_module(region: PosetRegion, field: Field = QQ) -> EncodedModule:
    """k[R] for an upset, downset or interval R: k on R, identities inside R."""
    dims = region.mask.astype(int)
    maps = {(i, j): field.mat([[1]]) for i, j in region.poset.covers if dims[i] and dims[j]}
    return EncodedModule(region.poset, dims, maps, field, check=False)


# morphisms


class ModuleMorphism:
    def __init__(self, source: EncodedModule, target: EncodedModule, comps, check: bool = True):
        if source.poset != target.poset:
            raise ValueError("morphism between modules on different carriers")
        self.source = source
        self.target = target
        self.field = source.field
        self.comps = []
        for i, (ds, dt) in enumerate(zip(source.dims, target.dims)):
            m = comps[i] if comps[i] is not None else self.field.zeros(dt, ds)
            m = np.asarray(m, dtype=object)
            if m.shape != (dt, ds):
                raise ValueError(f"component at {source.poset.elements[i]} has shape {m.shape}, expected {(dt, ds)}")
            self.comps.append(self.field.reduce(m))
        if check:
            self.check()

    def __repr__(self):
        return f"ModuleMorphism({self.source!r} -> {self.target!r})"

    def check(self):
        f = self.field
        for i, j in self.source.poset.covers:
            left = f.matmul(self.target.maps[(i, j)], self.comps[i])
            right = f.matmul(self.comps[j], self.source.maps[(i, j)])
            if not f.equal(left, right):
                e = self.source.poset.elements
                raise CommutativityError((e[i], e[j]), "morphism square does not commute")

    def compose(self, after: "ModuleMorphism") -> "ModuleMorphism":
        """``after`` applied after ``self``."""
        f = self.field
        comps = [f.matmul(b, a) for a, b in zip(self.comps, after.comps)]
        return ModuleMorphism(self.source, after.target, comps, check=False)

    def is_injective(self) -> bool:
        return all(self.field.rank(m) == m.shape[1] for m in self.comps)

    def is_surjective(self) -> bool:
        return all(self.field.rank(m) == m.shape[0] for m in self.comps)

    def is_zero(self) -> bool:
        return all(self.field.is_zero(m) for m in self.comps)

    def first_failure(self, test):
        for i, m in enumerate(self.comps):
            if not test(m):
                return self.source.poset.elements[i]
        return None


def identity_morphism(m: EncodedModule) -> ModuleMorphism:
    return ModuleMorphism(m, m, [m.field.eye(d) for d in m.dims], check=False)


def zero_morphism(source: EncodedModule, target: EncodedModule) -> ModuleMorphism:
    return ModuleMorphism(source, target, [None] * len(source.dims), check=False)


def verify_isomorphism(phi: ModuleMorphism) -> bool:
    """True iff every component is an invertible matrix."""
    return all(phi.field.is_invertible(m) for m in phi.comps)


def kernel(phi: ModuleMorphism):
    """Kernel module and its inclusion into the source."""
    f, src = phi.field, phi.source
    bases = [f.nullspace(m) for m in phi.comps]
    lefts = [f.left_inverse(b) for b in bases]
    dims = [b.shape[1] for b in bases]
    maps = {}
    for i, j in src.poset.covers:
        maps[(i, j)] = f.chain(lefts[j], src.maps[(i, j)], bases[i])
    k = src.with_data(dims, maps)
    return k, ModuleMorphism(k, src, bases, check=False)


def cokernel(phi: ModuleMorphism):
    """Cokernel module and the projection from the target."""
    f, tgt = phi.field, phi.target
    quots = [f.left_nullspace(m) for m in phi.comps]
    sections = [_section(f, q) for q in quots]
    dims = [q.shape[0] for q in quots]
    maps = {}
    for i, j in tgt.poset.covers:
        maps[(i, j)] = f.chain(quots[j], tgt.maps[(i, j)], sections[i])
    c = tgt.with_data(dims, maps)
    return c, ModuleMorphism(tgt, c, quots, check=False)


def image(phi: ModuleMorphism):
    """Image module with the surjection from the source and inclusion into the target."""
    f, src, tgt = phi.field, phi.source, phi.target
    bases = [f.colspace(m) for m in phi.comps]
    lefts = [f.left_inverse(b) for b in bases]
    dims = [b.shape[1] for b in bases]
    maps = {}
    for i, j in tgt.poset.covers:
        maps[(i, j)] = f.chain(lefts[j], tgt.maps[(i, j)], bases[i])
    im = tgt.with_data(dims, maps)
    onto = ModuleMorphism(src, im, [f.matmul(l, m) for l, m in zip(lefts, phi.comps)], check=False)
    into = ModuleMorphism(im, tgt, bases, check=False)
    return im, onto, into


def _section(f: Field, q: np.ndarray) -> np.ndarray:
    """Right inverse of a matrix in reduced echelon form (unit vectors at pivots)."""
    s = f.zeros(q.shape[1], q.shape[0])
    for r in range(q.shape[0]):
        c = next(c for c in range(q.shape[1]) if q[r, c] != 0)
        s[c, r] = f.inv(q[r, c])
    return s


def direct_sum(*mods: EncodedModule):
    """Direct sum with its canonical injections and projections."""
    base = mods[0]
    f = base.field
    dims = [sum(m.dims[i] for m in mods) for i in range(len(base.dims))]
    maps = {k: block_diag(f, [m.maps[k] for m in mods]) for k in base.maps}
    s = base.with_data(dims, maps)
    injections, projections = [], []
    offsets = np.zeros(len(dims), dtype=int)
    for m in mods:
        inj, proj = [], []
        for i, d in enumerate(m.dims):
            e = f.zeros(dims[i], d)
            for r in range(d):
                e[offsets[i] + r, r] = 1
            inj.append(e)
            proj.append(e.T.copy())
            offsets[i] += d
        injections.append(ModuleMorphism(m, s, inj, check=False))
        projections.append(ModuleMorphism(s, m, proj, check=False))
    return s, injections, projections


def morphism_sum(maps) -> ModuleMorphism:
    """The map into a direct sum assembled from maps sharing a source."""
    src = maps[0].source
    tgt, _, _ = direct_sum(*[m.target for m in maps])
    comps = [np.concatenate([m.comps[i] for m in maps], axis=0) for i in range(len(src.dims))]
    return ModuleMorphism(src, tgt, comps, check=False)


# change of carrier


def pullback(h: EncodedModule, pi: PosetMorphism) -> EncodedModule:
    """(π*H)_q = H_π(q) with structure maps inherited from H."""
    if pi.target != h.poset:
        raise ValueError("morphism target is not the module's carrier")
    dims = [h.dims[pi.images[i]] for i in range(len(pi.source))]
    maps = {(i, j): h.transition(pi.images[i], pi.images[j]) for i, j in pi.source.covers}
    return EncodedModule(pi.source, dims, maps, h.field, check=False)


def pullback_morphism(phi: ModuleMorphism, pi: PosetMorphism, source=None, target=None) -> ModuleMorphism:
    source = source or pullback(phi.source, pi)
    target = target or pullback(phi.target, pi)
    return ModuleMorphism(source, target, [phi.comps[pi.images[i]] for i in range(len(pi.source))], check=False)


def pushforward(coords, h: EncodedModule, lo=None, hi=None) -> FinDetModule:
    """Left Kan extension of H along an order embedding into Z^n.

    ``coords[p]`` is the image of element p.  At z the value is the colimit
    of H over {p : ι(p) <= z}, the cokernel of the difference map on covers;
    when that set has a largest element the colimit is read off directly.
    """
    coords = np.asarray(coords, dtype=int)
    p = h.poset
    le = (coords[:, None, :] <= coords[None, :, :]).all(axis=2)
    if not (le == p.leq).all():
        raise ValueError("coordinates do not give an order embedding")
    n = coords.shape[1]
    lo = tuple(coords.min(axis=0) - 1) if lo is None else tuple(lo)
    hi = tuple(coords.max(axis=0)) if hi is None else tuple(hi)
    if (coords < np.array(lo) + 1).any() or (coords > np.array(hi)).any():
        raise ValueError("embedding does not fit strictly inside the box")
    f = h.field
    grid = grid_poset(lo, hi)
    quot, sect, below = [], [], []
    for z in grid.elements:
        s = [int(i) for i in np.flatnonzero((coords <= np.array(z)).all(axis=1))]
        below.append(s)
        offs = np.cumsum([0] + [h.dims[i] for i in s])
        total = int(offs[-1])
        top = [m for m in s if all(p.leq[i, m] for i in s)]
        if not s:
            q, sec = f.zeros(0, 0), f.zeros(0, 0)
        elif top:
            m = top[0]
            blocks = [h.transition(i, m) for i in s]
            q = np.concatenate(blocks, axis=1) if total else f.zeros(h.dims[m], 0)
            sec = f.zeros(total, h.dims[m])
            k = s.index(m)
            for r in range(h.dims[m]):
                sec[offs[k] + r, r] = 1
        else:
            rels = []
            pos = {i: k for k, i in enumerate(s)}
            for a, b in p.covers:
                if a in pos and b in pos and h.dims[a]:
                    col = f.zeros(total, h.dims[a])
                    col[offs[pos[a]]:offs[pos[a] + 1], :] = f.eye(h.dims[a])
                    col[offs[pos[b]]:offs[pos[b] + 1], :] = f.neg(h.maps[(a, b)])
                    rels.append(col)
            r = np.concatenate(rels, axis=1) if rels else f.zeros(total, 0)
            q = f.left_nullspace(r) if total else f.zeros(0, 0)
            sec = _section(f, q)
        quot.append(q)
        sect.append(sec)
    dims = [q.shape[0] for q in quot]
    maps = {}
    for a, b in grid.covers:
        sa, sb = below[a], below[b]
        offs_b = np.cumsum([0] + [h.dims[i] for i in sb])
        incl = f.zeros(int(offs_b[-1]), sect[a].shape[0])
        ra = 0
        for i in sa:
            k = sb.index(i)
            incl[offs_b[k]:offs_b[k] + h.dims[i], ra:ra + h.dims[i]] = f.eye(h.dims[i])
            ra += h.dims[i]
        maps[(a, b)] = f.chain(quot[b], incl, sect[a])
    return FinDetModule(lo, hi, dims, maps, f, check=False, poset=grid)


def restrict_to_image(m: FinDetModule, coords, poset: FinitePoset) -> EncodedModule:
    """Restriction of a Z^n-module to the image of an order embedding."""
    coords = [tuple(int(x) for x in c) for c in coords]
    dims = [m.dim_at(c) for c in coords]
    maps = {(i, j): m.map_between(coords[i], coords[j]) for i, j in poset.covers}
    return EncodedModule(poset, dims, maps, m.field, check=False)


# faces and coprimary modules


def associated_faces(m: FinDetModule) -> list:
    """Faces σ carrying an element killed by every step off σ but by no step along σ.

    Faces are tuples of 0-based axes.  A homogeneous y in degree q with
    x_i y = 0 for i outside σ and x^u y != 0 for every u supported on σ has
    annihilator exactly the monomial prime of σ, so these are the associated
    faces of M.
    """
    f = m.field
    out = []
    for sigma in all_faces(m.n):
        off = [k for k in range(m.n) if k not in sigma]
        found = False
        for q in m.cells():
            if not m.dim_at(q) or any(q[k] >= m.hi[k] for k in off):
                continue
            kill = np.concatenate([m.step(q, k) for k in off], axis=0) if off else f.zeros(0, m.dim_at(q))
            ker = f.nullspace(kill)
            if ker.shape[1] and not f.is_zero(f.matmul(m.map_between(q, m.raise_to_top(q, sigma)), ker)):
                found = True
                break
        if found:
            out.append(sigma)
    return out


def coprimary_test(m: FinDetModule, tau) -> bool:
    """Whether M is τ-coprimary.

    M qualifies exactly when it is nonzero and every nonzero homogeneous
    element can be pushed to a nonzero element that survives every push
    along τ and dies after enough pushes in each direction off τ.  For a
    finitely determined module this holds iff τ is its only associated
    face, which is what is scanned here over the box.
    """
    tau = tuple(sorted(tau))
    if m.is_zero():
        return False
    return associated_faces(m) == [tau]
