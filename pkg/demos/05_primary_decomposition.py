"""Primary decomposition of a downset and of a module.

The downset below is two horizontal strips glued to a bounded block.  Its
canonical decomposition has one piece persisting along the first axis and
one bounded piece.  Faces are written as tuples of 0-based axes.
"""

from posetmod.field import QQ
from posetmod.generators import random_findet
from posetmod.lattice import FinDetRegion, canonical_primary_decomposition_downset
from posetmod.primary import associated_faces_scan, global_support, primary_decomposition, region_module

d = FinDetRegion.from_predicate((-2, -2), (5, 5), lambda q: q[1] <= 1 or (q[0] <= 0 and q[1] <= 3), "downset")
for tau, part in canonical_primary_decomposition_downset(d):
    print("face", tau)
    print(part.mask.T[::-1].astype(int))

dec = primary_decomposition(region_module(d, QQ))
print("module components:", dec.faces, "injective:", dec.is_injective())

m = random_findet(3, 4, seed=0)
dec = primary_decomposition(m)
print("random Z^3 module: faces", dec.faces, "scan agrees:", dec.faces == associated_faces_scan(m))
for tau in [(), (0,), (0, 1, 2)]:
    print("support on", tau, "has dimension", global_support(m, tau)[0].total_dim)
