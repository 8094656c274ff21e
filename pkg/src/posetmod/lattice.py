"""Boxed regions in Z^n, faces of N^n, and primary components of downsets.

Faces are tuples of 0-based axes.  A ``FinDetRegion`` stores a boolean
array on the box [lo, hi]; membership of an arbitrary q in Z^n is the value
at clamp(q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def face(axes) -> tuple:
    return tuple(sorted(set(int(a) for a in axes)))


def all_faces(n: int) -> list:
    """Every subset of range(n), ordered by bitmask."""
    return [tuple(k for k in range(n) if mask >> k & 1) for mask in range(1 << n)]


def face_mask(tau) -> int:
    return sum(1 << k for k in tau)


def _up_close(mask: np.ndarray) -> np.ndarray:
    for ax in range(mask.ndim):
        mask = np.logical_or.accumulate(mask, axis=ax)
    return mask


def _down_close(mask: np.ndarray) -> np.ndarray:
    for ax in range(mask.ndim):
        mask = np.flip(np.logical_or.accumulate(np.flip(mask, ax), axis=ax), ax)
    return mask


class FinDetRegion:
    """A subset of Z^n determined by its trace on a box via clamping."""

    def __init__(self, lo, hi, mask, kind: str = "set", check: bool = True):
        self.lo = tuple(int(x) for x in lo)
        self.hi = tuple(int(x) for x in hi)
        self.n = len(self.lo)
        self.shape = tuple(b - a + 1 for a, b in zip(self.lo, self.hi))
        self.mask = np.asarray(mask, dtype=bool).reshape(self.shape).copy()
        self.mask.setflags(write=False)
        if kind not in ("upset", "downset", "set"):
            raise ValueError(f"unknown region kind {kind!r}")
        self.kind = kind
        if check:
            self.check()

    @classmethod
    def from_predicate(cls, lo, hi, pred, kind="set", check=True) -> "FinDetRegion":
        cells = itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        mask = np.array([bool(pred(q)) for q in cells], dtype=bool).reshape(shape)
        return cls(lo, hi, mask, kind, check)

    @classmethod
    def full(cls, lo, hi, kind="set") -> "FinDetRegion":
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        return cls(lo, hi, np.ones(shape, dtype=bool), kind, check=False)

    @classmethod
    def empty(cls, lo, hi, kind="set") -> "FinDetRegion":
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        return cls(lo, hi, np.zeros(shape, dtype=bool), kind, check=False)

    def check(self):
        """Closure of the box trace and of its one-layer extension."""
        if self.kind == "set":
            return
        closed = _up_close if self.kind == "upset" else _down_close
        if not (closed(self.mask) == self.mask).all():
            raise ValueError(f"box trace is not a {self.kind}")
        ext = self.resample([a - 1 for a in self.lo], [b + 1 for b in self.hi]).mask
        if not (closed(ext) == ext).all():
            raise ValueError(f"clamped extension is not a {self.kind}")

    def __repr__(self):
        return f"FinDetRegion({self.kind}, box={self.lo}..{self.hi}, cells={int(self.mask.sum())})"

    def clamp(self, q):
        return tuple(min(max(int(x), a), b) for x, a, b in zip(q, self.lo, self.hi))

    def __contains__(self, q) -> bool:
        c = self.clamp(q)
        return bool(self.mask[tuple(x - a for x, a in zip(c, self.lo))])

    def __bool__(self):
        return bool(self.mask.any())

    def cells(self):
        return [tuple(int(x) + a for x, a in zip(idx, self.lo)) for idx in np.argwhere(self.mask)]

    def resample(self, lo, hi, kind=None) -> "FinDetRegion":
        """Same subset of Z^n, stored on another box."""
        idx = np.ix_(*[np.clip(np.arange(a, b + 1), l0, h0) - l0
                       for a, b, l0, h0 in zip(lo, hi, self.lo, self.hi)])
        return FinDetRegion(lo, hi, self.mask[idx], kind or self.kind, check=False)

    def _common(self, other):
        if self.lo == other.lo and self.hi == other.hi:
            return self, other
        lo = tuple(map(min, self.lo, other.lo))
        hi = tuple(map(max, self.hi, other.hi))
        return self.resample(lo, hi), other.resample(lo, hi)

    def __eq__(self, other):
        if not isinstance(other, FinDetRegion):
            return NotImplemented
        a, b = self._common(other)
        return bool((a.mask == b.mask).all())

    def __hash__(self):
        return hash((self.lo, self.hi, self.mask.tobytes()))

    def __and__(self, other) -> "FinDetRegion":
        a, b = self._common(other)
        kind = a.kind if a.kind == b.kind else "set"
        return FinDetRegion(a.lo, a.hi, a.mask & b.mask, kind, check=False)

    def __or__(self, other) -> "FinDetRegion":
        a, b = self._common(other)
        kind = a.kind if a.kind == b.kind else "set"
        return FinDetRegion(a.lo, a.hi, a.mask | b.mask, kind, check=False)

    def __sub__(self, other) -> "FinDetRegion":
        a, b = self._common(other)
        return FinDetRegion(a.lo, a.hi, a.mask & ~b.mask, "set", check=False)

    def complement(self) -> "FinDetRegion":
        kind = {"upset": "downset", "downset": "upset"}.get(self.kind, "set")
        return FinDetRegion(self.lo, self.hi, ~self.mask, kind, check=False)

    def issubset(self, other) -> bool:
        a, b = self._common(other)
        return not (a.mask & ~b.mask).any()

    def down_closure(self) -> "FinDetRegion":
        """The downset S - N^n of the clamped set S."""
        return FinDetRegion(self.lo, self.hi, _down_close(self.mask), "downset", check=False)

    def up_closure(self) -> "FinDetRegion":
        return FinDetRegion(self.lo, self.hi, _up_close(self.mask), "upset", check=False)

    def flat_mask(self) -> np.ndarray:
        """Box trace in the lexicographic cell order used by box modules."""
        return self.mask.reshape(-1)


@dataclass(frozen=True, order=True)
class FlatLabel:
    """The upset b + Zτ + N^n; coordinates of b along τ are stored as 0."""

    b: tuple
    tau: tuple

    def __post_init__(self):
        tau = face(self.tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "b", tuple(0 if k in tau else int(x) for k, x in enumerate(self.b)))

    def __contains__(self, q) -> bool:
        return all(k in self.tau or x >= b for k, (x, b) in enumerate(zip(q, self.b)))

    def fits(self, lo, hi) -> bool:
        return all(k in self.tau or lo[k] < b <= hi[k] for k, b in enumerate(self.b))

    def region(self, lo, hi) -> FinDetRegion:
        if not self.fits(lo, hi):
            raise ValueError(f"{self} needs a box with margin below b")
        return FinDetRegion.from_predicate(lo, hi, self.__contains__, "upset", check=False)

    def dual(self) -> "InjLabel":
        return InjLabel(tuple(-x for x in self.b), self.tau)


@dataclass(frozen=True, order=True)
class InjLabel:
    """The downset b + Zτ - N^n; coordinates of b along τ are stored as 0."""

    b: tuple
    tau: tuple

    def __post_init__(self):
        tau = face(self.tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "b", tuple(0 if k in tau else int(x) for k, x in enumerate(self.b)))

    def __contains__(self, q) -> bool:
        return all(k in self.tau or x <= b for k, (x, b) in enumerate(zip(q, self.b)))

    def fits(self, lo, hi) -> bool:
        return all(k in self.tau or lo[k] <= b < hi[k] for k, b in enumerate(self.b))

    def region(self, lo, hi) -> FinDetRegion:
        if not self.fits(lo, hi):
            raise ValueError(f"{self} needs a box with margin above b")
        return FinDetRegion.from_predicate(lo, hi, self.__contains__, "downset", check=False)

    def dual(self) -> FlatLabel:
        return FlatLabel(tuple(-x for x in self.b), self.tau)


def flat_meets_inj(flat: FlatLabel, inj: InjLabel) -> bool:
    """Whether b_F + Zτ' + N^n meets b_E + Zτ - N^n.

    Coordinates free in either face impose nothing; every other coordinate
    needs b_F <= b_E.
    """
    if len(flat.b) != len(inj.b):
        raise ValueError("labels live in different dimensions")
    free = set(flat.tau) | set(inj.tau)
    return all(k in free or a <= b for k, (a, b) in enumerate(zip(flat.b, inj.b)))


def meeting_degree(flat: FlatLabel, inj: InjLabel, lo, hi):
    """A degree of the box lying in both labels, or None."""
    if not flat_meets_inj(flat, inj):
        return None
    q = []
    for k in range(len(lo)):
        a = flat.b[k] if k not in flat.tau else lo[k]
        b = inj.b[k] if k not in inj.tau else hi[k]
        q.append(min(max(a, lo[k]), hi[k]))
    return tuple(q)


def _require_downset(d: FinDetRegion):
    if d.kind != "downset":
        raise ValueError("expected a downset")


def localize_downset(d: FinDetRegion, tau) -> FinDetRegion:
    """D_τ = {q : q + Nτ ⊆ D}: test membership with τ-coordinates at the box top."""
    _require_downset(d)
    m = d.mask
    for k in face(tau):
        m = np.broadcast_to(np.take(m, [-1], axis=k), m.shape)
    return FinDetRegion(d.lo, d.hi, m & d.mask, "downset", check=False)


def global_support_downset(d: FinDetRegion, tau) -> FinDetRegion:
    """Γ_τ D: points of D outside D_{i} for every axis i off τ.

    Any face not inside τ contains such an axis i, and D_τ' ⊆ D_{i} then,
    so checking single axes is the same as checking all τ' ⊄ τ.
    """
    _require_downset(d)
    tau = face(tau)
    m = d.mask.copy()
    for k in range(d.n):
        if k not in tau:
            m &= ~localize_downset(d, (k,)).mask
    return FinDetRegion(d.lo, d.hi, m, "set", check=False)


def local_support_downset(d: FinDetRegion, tau) -> FinDetRegion:
    return global_support_downset(localize_downset(d, tau), tau)


def primary_component_downset(d: FinDetRegion, tau) -> FinDetRegion:
    """P_τ(D): the downset cogenerated by the local τ-support."""
    return local_support_downset(d, tau).down_closure()


def canonical_primary_decomposition_downset(d: FinDetRegion) -> list:
    """(τ, P_τ(D)) for every face with nonempty local support, by face bitmask."""
    _require_downset(d)
    out = []
    for tau in all_faces(d.n):
        if local_support_downset(d, tau):
            out.append((tau, primary_component_downset(d, tau)))
    return out


def disjoint_supports_downset(d: FinDetRegion) -> dict:
    """Debug view: the local support Γ_τ(D_τ) of every face."""
    return {tau: local_support_downset(d, tau) for tau in all_faces(d.n)}
