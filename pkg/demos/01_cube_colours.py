"""
Colour counts on cubical grids
==============================

"""

import numpy as np
from spernerkit.labelings import (
    canonical_colouring, random_sperner_colouring, check_cubical_sperner,
    max_colours_per_cube, cube_palette, decode_bits,
)

# the canonical colouring: bit i is on exactly when coordinate i sits at n
phi = canonical_colouring(2, 3)
print(phi.colours)
print(check_cubical_sperner(phi))   # None means no violation

sigma, count = max_colours_per_cube(phi)
print(sigma, count, sorted(cube_palette(phi, sigma)))
print([decode_bits(c, 2) for c in sorted(cube_palette(phi, sigma))])

# random valid colourings; the count never drops below N+1
for N in (1, 2, 3):
    counts = [max_colours_per_cube(random_sperner_colouring(N, 3, s, "few"))[1]
              for s in range(200)]
    print(N, min(counts), np.bincount(counts))

# break the condition on purpose
bad = phi.colours.copy()
bad[3, 0] = bad[0, 0]
from spernerkit.labelings import Colouring
print(check_cubical_sperner(Colouring(2, 3, bad)))
