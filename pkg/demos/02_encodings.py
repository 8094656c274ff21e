"""Constant subdivisions and uptight encodings.

The bowtie module has two minima L, R below two maxima T, B, with every map
1 except R -> T, which is 2.  All four spaces are isomorphic, yet the single
isotypic region is not a constant subdivision: going L -> T <- R -> B <- L
around the bowtie multiplies by 2.  Separating the minima and the maxima
fixes this, and the resulting encoding recovers the module by pullback.
"""

from posetmod.encoding import (SubdivisionError, isotypic_partition, uptight_encoding, uptight_poset,
                               uptight_regions, verify_constant_subdivision)
from posetmod.module import EncodedModule, grid_poset, verify_isomorphism
from posetmod.poset import PosetRegion, transitive_closure

p = transitive_closure("BLRT", [("L", "T"), ("L", "B"), ("R", "T"), ("R", "B")])
i = p.index
maps = {(i[a], i[b]): [[2 if (a, b) == ("R", "T") else 1]] for a, b in
        [("L", "T"), ("L", "B"), ("R", "T"), ("R", "B")]}
m = EncodedModule(p, [1, 1, 1, 1], maps)

try:
    verify_constant_subdivision(m, isotypic_partition(m))
except SubdivisionError as exc:
    print("isotypic partition rejected:", exc.reason, exc.witness)

s = verify_constant_subdivision(m, [[i["B"]], [i["L"], i["T"]], [i["R"]]])
enc = uptight_encoding(m, s)
print("encoding poset has", len(enc.H.poset), "elements; pullback isomorphic:", verify_isomorphism(enc.witness))

# Uptight regions need not be ordered transitively before closing up.
g = grid_poset((0, 0), (4, 4))


def ideal(*gens):
    return PosetRegion(g, [any(q[0] >= a and q[1] >= b for a, b in gens) for q in g.elements], "upset")


ups = [ideal((2, 0), (0, 1)), ideal((3, 0), (0, 1)), ideal((1, 1)), ideal((2, 1))]
up = uptight_poset(uptight_regions(g, ups), g)
a, b, c = (up.region_of[g.index[q]] for q in [(2, 0), (3, 0), (1, 1)])
print("A < B:", bool(up.witness[a, b]), " B < C:", bool(up.witness[b, c]),
      " A < C before closure:", bool(up.witness[a, c]), " after:", bool(up.poset.leq[a, c]))
