"""Shared builders for tests."""

import os
import random

import sympy

from posetmod.field import QQ
from posetmod.lattice import FinDetRegion
from posetmod.module import FinDetModule

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def sympy_rank(a, p=0):
    """Rank through sympy, independent of the package's elimination."""
    rows = [[sympy.Rational(str(x)) for x in row] for row in a]
    if not rows or not rows[0]:
        return 0
    m = sympy.Matrix(rows)
    if p:
        from sympy.polys.matrices import DomainMatrix
        from sympy import GF
        dm = DomainMatrix.from_Matrix(m.applyfunc(lambda x: int(x) % p)).convert_to(GF(p))
        return dm.rank()
    return m.rank()


def monomial_downset(lo, hi, pred):
    return FinDetRegion.from_predicate(lo, hi, pred, "downset")


def ideal_module(gens, lo, hi, f=QQ):
    """k[U] for the upset generated by the exponent vectors ``gens``."""
    up = FinDetRegion.from_predicate(lo, hi, lambda q: any(all(a >= b for a, b in zip(q, g)) for g in gens), "upset")
    return region_module(up, f)


def region_module(r, f=QQ):
    from posetmod.primary import region_module as rm
    return rm(r, f)


def bar_module(bars, lo, hi, f=QQ):
    """Direct sum of interval modules [b, d) on the chain lo..hi; d None means infinite."""
    cells = list(range(lo, hi + 1))
    present = [[i for i, (b, d) in enumerate(bars) if b <= q and (d is None or q < d)] for q in cells]
    maps = {}
    for k in range(len(cells) - 1):
        a, b = present[k], present[k + 1]
        m = f.zeros(len(b), len(a))
        for c, i in enumerate(a):
            if i in b:
                m[b.index(i), c] = 1
        maps[(k, k + 1)] = m
    return FinDetModule((lo,), (hi,), [len(p) for p in present], maps, f)


def random_bars(seed, count=10, span=20):
    rng = random.Random(seed)
    bars = []
    for _ in range(count):
        b = rng.randint(0, span)
        d = None if rng.random() < 0.3 else b + rng.randint(1, 8)
        bars.append((b, d))
    return bars
