"""
Adaptive dyadic subdivision
===========================

Split cubes until each one fits in some member of the cover.
"""

from fractions import Fraction as F
from spernerkit.covers import BoxCover, RationalBox, random_open_cover
from spernerkit.subdivision import (
    adaptive_subdivide, complex_colour_stats, well_founded_check, face_violations,
)

left = RationalBox((F(0),), (F(1, 2),), (False,), (True,))
right = RationalBox((F(1, 4),), (F(1),), (True,), (False,))
cover = BoxCover(1, ((0, (left,)), (1, (right,))))

tree = adaptive_subdivide(cover)
for leaf in tree.leaves:
    b = leaf.cube.box()
    print(f"[{b.lo[0]}, {b.hi[0]}] -> member {leaf.label}")
print(well_founded_check(tree))

cover = random_open_cover(2, seed=7)
tree = adaptive_subdivide(cover)
print(len(tree.leaves), "leaves, depth", tree.depth(), "volume", tree.leaf_volume())
stats = complex_colour_stats(tree, cover)
print("colours per leaf:", stats.histogram, "hanging-vertex pairs:", len(face_violations(tree)))

# too shallow a budget leaves refused cubes behind
shallow = adaptive_subdivide(cover, max_level=1)
print(well_founded_check(shallow), len(shallow.refused))

print(tree.to_jsonl().splitlines()[0])
