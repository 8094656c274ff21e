"""Homology of a bifiltered complex as a module, and its fringe presentation.

Three vertices r, b, g enter at different degrees (b at two incomparable
ones) and two edges merge them.  H_0 is computed once per distinct subcomplex;
the subcomplex poset is an encoding, and presenting through it gives a 3x3
fringe matrix.  The same steps are available from the command line:

    posetmod phom tests/data/worked_filtration.json --dim 0 --encoding -o enc.json
    posetmod fringe enc.json
"""

import os

from posetmod import io
from posetmod.filtration import natural_encoding, persistent_homology
from posetmod.fringe import fringe_presentation, verify_fringe

here = os.path.dirname(os.path.abspath(__file__))
fil = io.filtration_from_json(io.load_path(os.path.join(here, "..", "tests", "data", "worked_filtration.json")))

m = persistent_homology(fil, 0)
print("H_0 dimensions, y increasing downward:")
print(m.dim_array().T)

enc = natural_encoding(fil, 0)
print("distinct subcomplexes:", len(enc.H.poset))
phi = fringe_presentation(m, enc)
print("fringe", phi.shape, "verified:", verify_fringe(phi, m))
print("births:", [min(r.members) for r in phi.rows])
print(io.matrix_to_json(m.field, phi.entries))
print("box flange instead:", fringe_presentation(m).shape)
