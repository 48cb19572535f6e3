"""
Nerve posets and extension chains
=================================

"""

from fractions import Fraction as F
from spernerkit.covers import BoxCover, RationalBox, random_open_cover, max_multiplicity_point
from spernerkit.chains import (
    build_nerve_poset, max_chain_length, nested_cover_chain,
    CanonicalOracle, HashedOracle, extension_chain_search, check_extension_chain,
)


def interval(a, b):
    return (RationalBox.closed((F(a),), (F(b),)),)


cover = BoxCover(1, ((1, interval(0, "2/5")), (2, interval("3/10", "7/10")),
                     (3, interval("3/5", 1))))
poset = build_nerve_poset(cover, 3)
for e in poset.ordered():
    print(sorted(e))
print("longest chain", max_chain_length(poset))
print(nested_cover_chain(cover, 2), nested_cover_chain(cover, 3))

# random planar covers: chains are at least as long as the deepest point
for seed in range(5):
    c = random_open_cover(2, seed)
    p = build_nerve_poset(c, 4)
    print(seed, len(p.elements), max_chain_length(p), len(max_multiplicity_point(c)[1]))

# finite-support indices: grow the window, keep every colour seen so far
for oracle in (CanonicalOracle(2), HashedOracle(2, seed=1)):
    res = extension_chain_search(oracle, 4, w0=3, step=1)
    for (sigma, colour), w in zip(res.chain, res.windows):
        print(f"  W={w:2d} {sigma.to_text():32s} colour {colour}")
    print(oracle.name, "checker:", check_extension_chain(res.chain, oracle, res.windows) or "ok")
