"""Matlis duality, minimal resolutions and flange presentations on Z^n.

A finitely determined module is stored on a box; outside it the module is
constant along every axis.  The dual negates degrees and transposes maps,
turning injective resolutions into flat ones.
"""

from posetmod import io
from posetmod.generators import random_findet
from posetmod.homalg import (double_dual_map, flange_presentation, matlis_dual, minimal_flat_resolution,
                             minimal_injective_resolution)
from posetmod.module import verify_isomorphism

m = random_findet(n=2, size=5, seed=6)
print(m)
print(m.dim_array())

d = matlis_dual(m)
print("dual lives on", d.lo, "..", d.hi, "; double dual isomorphic:", verify_isomorphism(double_dual_map(m)))

inj = minimal_injective_resolution(m)
flat = minimal_flat_resolution(m)
for res in (inj, flat):
    print(f"{res.kind} resolution, length {res.length}, exact {res.is_exact()}, minimal {res.is_minimal()}")
    for k, t in enumerate(res.terms):
        print("  term", k, [f"{lab.b}+Z{list(lab.tau)}" for lab in t])

fl = flange_presentation(m)
print("flange matrix", fl.matrix.shape)
print(io.matrix_to_json(m.field, fl.matrix.entries))
