"""Downset hulls, primary decomposition, localization and support functors
for finitely determined Z^n-modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homalg import injective_hull
from .lattice import (FinDetRegion, all_faces, canonical_primary_decomposition_downset, face)
from .module import (FinDetModule, ModuleMorphism, associated_faces as _scan_faces, coprimary_test,
                     grid_poset, image, kernel, morphism_sum)

MAX_FACES_DIM = 6


class DecompositionError(RuntimeError):
    def __init__(self, witness, msg):
        self.witness = witness
        super().__init__(f"{msg}: {witness}")


# localization and support


def localize(m: FinDetModule, tau):
    """(M_τ, M -> M_τ).  In degree q the localization is M at q pushed to the box top along τ."""
    tau = face(tau)
    f = m.field
    grid = m.poset
    top = [m.cell(m.raise_to_top(q, tau)) for q in grid.elements]
    dims = [m.dims[t] for t in top]
    maps = {(i, j): m.transition(top[i], top[j]) for i, j in grid.covers}
    loc = FinDetModule(m.lo, m.hi, dims, maps, f, check=False, poset=grid)
    comps = [m.transition(i, top[i]) for i in range(len(grid))]
    return loc, ModuleMorphism(m, loc, comps, check=False)


def localize_morphism(phi: ModuleMorphism, tau, source=None, target=None) -> ModuleMorphism:
    tau = face(tau)
    a, b = phi.source, phi.target
    source = source or localize(a, tau)[0]
    target = target or localize(b, tau)[0]
    comps = [phi.comps[a.cell(a.raise_to_top(q, tau))] for q in a.poset.elements]
    return ModuleMorphism(source, target, comps, check=False)


def global_support(m: FinDetModule, tau):
    """(Γ_τ M, inclusion): elements killed by localizing along every axis off τ.

    Every face not inside τ contains such an axis and localizing along it
    factors through the single-axis localization, so single axes suffice.
    """
    tau = face(tau)
    off = [k for k in range(m.n) if k not in tau]
    if not off:
        return m, ModuleMorphism(m, m, [m.field.eye(d) for d in m.dims], check=False)
    return kernel(morphism_sum([localize(m, (k,))[1] for k in off]))


def local_support(m: FinDetModule, tau):
    """Γ_τ(M_τ) with its inclusion into M_τ."""
    return global_support(localize(m, tau)[0], tau)


def support_morphism(phi: ModuleMorphism, tau, source=None, target=None) -> ModuleMorphism:
    """The map Γ_τ A -> Γ_τ B induced by φ : A -> B."""
    f = phi.field
    ga, ia = source or global_support(phi.source, tau)
    gb, ib = target or global_support(phi.target, tau)
    comps = []
    for x, p, y in zip(ia.comps, phi.comps, ib.comps):
        img = f.matmul(p, x)
        sol = f.solve(y, img)
        if sol is None:
            raise RuntimeError("image of the support escapes the support")
        comps.append(sol)
    return ModuleMorphism(ga, gb, comps, check=False)


def same_submodule(f, a: ModuleMorphism, b: ModuleMorphism) -> bool:
    """Whether two maps into one module have the same image degreewise."""
    for x, y in zip(a.comps, b.comps):
        r = f.rank(x)
        if r != f.rank(y) or f.rank(np.concatenate([x, y], axis=1)) != r:
            return False
    return True


# hulls and decomposition


@dataclass
class DownsetHull:
    labels: list
    regions: list
    module: FinDetModule
    map: ModuleMorphism

    def is_injective(self) -> bool:
        return self.map.is_injective()


def downset_hull(m: FinDetModule) -> DownsetHull:
    """An injective hull read as a sum of downset modules."""
    h = injective_hull(m)
    regions = [lab.region(h.module.lo, h.module.hi) for lab in h.labels]
    bad = h.map.first_failure(lambda a: m.field.rank(a) == a.shape[1])
    if bad is not None:
        raise DecompositionError(bad, "downset hull is not injective")
    return DownsetHull(list(h.labels), regions, h.module, h.map)


def indicator_sum_box(regions, lo, hi, f) -> FinDetModule:
    """⊕ k[R_j] on the box, summands stored in list order at each cell."""
    grid = grid_poset(lo, hi)
    masks = [r.resample(lo, hi).flat_mask() for r in regions]
    present = [[j for j, mk in enumerate(masks) if mk[i]] for i in range(len(grid))]
    maps = {}
    for a, b in grid.covers:
        pa, pb = present[a], present[b]
        mat = f.zeros(len(pb), len(pa))
        where = {j: r for r, j in enumerate(pb)}
        for c, j in enumerate(pa):
            if j in where:
                mat[where[j], c] = 1
        maps[(a, b)] = mat
    return FinDetModule(lo, hi, [len(p) for p in present], maps, f, check=False, poset=grid)


@dataclass
class PrimaryComponent:
    tau: tuple
    quotient: FinDetModule
    projection: ModuleMorphism
    hull_regions: list


@dataclass
class PrimaryDecomposition:
    module: FinDetModule
    components: list
    combined: ModuleMorphism

    @property
    def faces(self) -> list:
        return [c.tau for c in self.components]

    def is_injective(self) -> bool:
        return self.combined.is_injective()


def primary_decomposition(m: FinDetModule, prune: bool = False, max_dim: int = MAX_FACES_DIM) -> PrimaryDecomposition:
    """M -> ⊕_τ M/M^τ with M^τ the kernel of M -> E^τ.

    Each hull downset is split into its canonical primary components; the
    τ-parts across all summands form E^τ.  The combined map is checked
    injective and each quotient τ-coprimary.  With ``prune`` components are
    dropped in face order while injectivity survives; this is a heuristic.
    """
    if m.n > max_dim:
        raise ValueError(f"face sweep capped at n <= {max_dim}")
    f = m.field
    if m.is_zero():
        return PrimaryDecomposition(m, [], None)
    h = downset_hull(m)
    m = h.map.source
    lo, hi = h.module.lo, h.module.hi
    parts = {}
    for j, d in enumerate(h.regions):
        for tau, p in canonical_primary_decomposition_downset(d):
            parts.setdefault(tau, []).append((j, p))
    comps = []
    for tau in all_faces(m.n):
        if tau not in parts:
            continue
        regs = [p for _, p in parts[tau]]
        e = indicator_sum_box(regs, lo, hi, f)
        rows = []
        for idx, q in enumerate(h.module.cells()):
            present = [j for j, r in enumerate(h.regions) if q in r]
            here = [k for k, (j, p) in enumerate(parts[tau]) if q in p]
            sel = [present.index(parts[tau][k][0]) for k in here]
            rows.append(h.map.comps[idx][sel, :] if sel else f.zeros(0, m.dims[idx]))
        to_e = ModuleMorphism(m, e, rows, check=True)
        quot, onto, _ = image(to_e)
        comps.append(PrimaryComponent(tau, quot, onto, regs))
    if prune:
        k = 0
        while k < len(comps) and len(comps) > 1:
            trial = comps[:k] + comps[k + 1:]
            if _combined(m, trial).is_injective():
                comps = trial
            else:
                k += 1
    combined = _combined(m, comps)
    bad = combined.first_failure(lambda a: f.rank(a) == a.shape[1])
    if bad is not None:
        raise DecompositionError(bad, "decomposition map is not injective")
    for c in comps:
        if not coprimary_test(c.quotient, c.tau):
            raise DecompositionError(c.tau, "component is not coprimary for its face")
    return PrimaryDecomposition(m, comps, combined)


def _combined(m, comps) -> ModuleMorphism:
    return morphism_sum([c.projection for c in comps])


def associated_faces(m: FinDetModule) -> list:
    """Faces carrying a component of the primary decomposition, by bitmask."""
    if m.is_zero():
        return []
    return primary_decomposition(m).faces


def associated_faces_scan(m: FinDetModule) -> list:
    """The same faces read off directly from annihilators of homogeneous elements."""
    return _scan_faces(m)


def region_module(region: FinDetRegion, f) -> FinDetModule:
    """k[R] for an upset, downset or convex region stored on a box."""
    return indicator_sum_box([region], region.lo, region.hi, f)
