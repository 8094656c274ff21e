"""Brute-force references: Hom spaces by a direct linear solve."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .module import EncodedModule, ModuleMorphism, verify_isomorphism

HOM_CAP = 900


class CapExceeded(RuntimeError):
    pass


@dataclass
class OracleReport:
    """Outcome of one property check; failures keep the seed for replay."""

    property: str
    seed: int
    passed: bool
    witness: object = None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else f" witness={self.witness!r}"
        return f"{tag} {self.property} seed={self.seed}{extra}"


def _layout(m: EncodedModule, n: EncodedModule):
    offs, k = [], 0
    for dm, dn in zip(m.dims, n.dims):
        offs.append(k)
        k += dm * dn
    return offs, k


def hom_space(m: EncodedModule, n: EncodedModule, cap: int = HOM_CAP) -> list:
    """Basis of Hom(M, N) from the commutativity constraints on covers."""
    if m.poset != n.poset:
        raise ValueError("modules live on different carriers")
    f = m.field
    offs, k = _layout(m, n)
    if k > cap:
        raise CapExceeded(f"{k} unknowns exceed the cap {cap}")
    rows = []
    for i, j in m.poset.covers:
        dmi, dmj, dni, dnj = m.dims[i], m.dims[j], n.dims[i], n.dims[j]
        if not dmi or not dnj:
            continue
        a, b = n.maps[(i, j)], m.maps[(i, j)]
        # (N_ij X_i - X_j M_ij)[r, c] = 0
        for r in range(dnj):
            for c in range(dmi):
                row = [0] * k
                for s in range(dni):
                    if a[r, s] != 0:
                        row[offs[i] + s * dmi + c] += a[r, s]
                for s in range(dmj):
                    if b[s, c] != 0:
                        row[offs[j] + r * dmj + s] -= b[s, c]
                if any(x != 0 for x in row):
                    rows.append(row)
    if k == 0:
        return []
    a = f.mat(rows, (len(rows), k)) if rows else f.zeros(0, k)
    basis = f.nullspace(a) if rows else f.eye(k)
    out = []
    for col in range(basis.shape[1]):
        v = basis[:, col]
        comps = [v[o:o + dm * dn].reshape(dn, dm) for o, dm, dn in zip(offs, m.dims, n.dims)]
        out.append(ModuleMorphism(m, n, [np.array(c, dtype=object) for c in comps], check=False))
    return out


def oracle_hom(m: EncodedModule, n: EncodedModule, cap: int = HOM_CAP) -> int:
    return len(hom_space(m, n, cap))


def random_combination(basis, m, n, rng: random.Random) -> ModuleMorphism:
    f = m.field
    comps = [f.zeros(dn, dm) for dm, dn in zip(m.dims, n.dims)]
    for phi in basis:
        c = rng.randint(-9, 9)
        if c:
            comps = [f.add(a, f.scale(c, b)) for a, b in zip(comps, phi.comps)]
    return ModuleMorphism(m, n, comps, check=False)


def find_isomorphism(m: EncodedModule, n: EncodedModule, seed: int = 0, tries: int = 8, cap: int = HOM_CAP):
    """A random element of Hom(M, N) that is invertible, or None.

    None does not prove non-isomorphism; over Q a handful of tries finds an
    isomorphism with overwhelming probability when one exists.
    """
    if m.dims != n.dims:
        return None
    basis = hom_space(m, n, cap)
    rng = random.Random(seed)
    for _ in range(tries):
        phi = random_combination(basis, m, n, rng)
        if verify_isomorphism(phi):
            return phi
    return None
