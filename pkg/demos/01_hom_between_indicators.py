"""Hom between an upset module and a downset module.

A map k[U] -> k[D] is a choice of scalar on each connected component of
U ∩ D, so its dimension is a component count.  We compare the count with a
brute-force linear solve, then look at the maximal ideal mapping into
k[x,y]/m^2 on a small box of N^2.
"""

from posetmod.field import QQ
from posetmod.generators import random_poset
from posetmod.lattice import FinDetRegion
from posetmod.module import indicator_module
from posetmod.oracle import oracle_hom
from posetmod.poset import downset_cogenerated, hom_indicator, pi0, upset_generated
from posetmod import io

p = random_poset(8, seed=4, p=0.3)
print(p)
u = upset_generated(p, [0, 2])
d = downset_cogenerated(p, [6, 7])
meet = u & d
print("U ∩ D =", meet.members, "components:", [c.members for c in pi0(meet)])
print("component count:", len(hom_indicator(u, d)))
print("linear solve:   ", oracle_hom(indicator_module(u), indicator_module(d)))

# <x, y> -> k[x,y]/m^2 on the box [0,2]^2
up = FinDetRegion.from_predicate((0, 0), (2, 2), lambda q: q != (0, 0), "upset")
down = FinDetRegion.from_predicate((0, 0), (2, 2), lambda q: sum(q) <= 1, "downset")
up, down = io.box_region_as_poset_region(up), io.box_region_as_poset_region(down)
basis = hom_indicator(up, down)
print("Hom(<x,y>, k[x,y]/m^2) has dimension", len(basis))
print("agrees with the solve:", oracle_hom(indicator_module(up, QQ), indicator_module(down, QQ)) == len(basis))
