"""Fringe presentations: upsets to downsets with a scalar matrix.

For a one-parameter module made of bars the scalar matrix is a permutation
with ones, each row the birth of a bar and each column its death.  For a
module on a finite poset the presentation is checked by rebuilding its image.
"""

from posetmod import io
from posetmod.field import QQ
from posetmod.fringe import check_fringe, fringe_presentation
from posetmod.generators import random_module, random_poset
from posetmod.module import FinDetModule

bars = [(0, 4), (2, None), (3, 7), (5, 6)]
lo, hi = -1, 9
present = [[k for k, (b, e) in enumerate(bars) if b <= q and (e is None or q < e)] for q in range(lo, hi + 1)]
maps = {}
for c in range(hi - lo):
    a, b = present[c], present[c + 1]
    mat = QQ.zeros(len(b), len(a))
    for j, k in enumerate(a):
        if k in b:
            mat[b.index(k), j] = 1
    maps[(c, c + 1)] = mat
m = FinDetModule((lo,), (hi,), [len(x) for x in present], maps)

phi = fringe_presentation(m)
print("births:", [min(r.members)[0] for r in phi.rows])
print("last alive:", [max(c.members)[0] for c in phi.cols])
print(io.matrix_to_json(QQ, phi.entries))

p = random_poset(7, seed=2, p=0.35)
n = random_module(p, seed=2)
phi = fringe_presentation(n)
print("finite poset module, dims", n.dims, "-> fringe", phi.shape, check_fringe(phi, n))
