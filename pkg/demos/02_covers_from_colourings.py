"""
From colourings to box covers and back
======================================

"""

from fractions import Fraction
from spernerkit.labelings import random_sperner_colouring, cube_palette
from spernerkit.covers import (
    colouring_to_cover, cover_to_colouring, max_multiplicity_point,
    rich_cube_via_cover, g_sigma,
)
from spernerkit.lattice import Index

# each grid index owns a box slightly wider than its cell
print(g_sigma(Index(3, (1, 2))))

phi = random_sperner_colouring(2, 3, seed=4, palette_mode="wide")
cover = colouring_to_cover(phi)
for label, d in sorted(cover.diameters().items()):
    print(label, d)             # all strictly below 1

x, labels = max_multiplicity_point(cover)
print("deepest point", [str(c) for c in x], "lies in", labels)

sigma, colours = rich_cube_via_cover(phi)
print(sigma, sorted(colours), sorted(cube_palette(phi, sigma)))

# sampling the cover at the grid points gives the colouring again
print(cover_to_colouring(cover, 3) == phi)

# a finer grid gives a different, still valid colouring
print(cover_to_colouring(cover, 5).colours)
