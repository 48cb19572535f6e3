"""Order witnesses for box covers of the unit cube.

Multiplicity (the number of members containing a point) is constant on each
cell of the arrangement cut out by the box endpoints.  Per axis we take every
endpoint in [0, 1] plus the midpoints between consecutive ones; the product of
these candidate lists meets every cell, so maximising over it is exact.  The
candidates are scaled to integers by a common denominator and evaluated with
numpy.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .boxes import ONE, ZERO, BoxCover, RationalBox, label_key, region_diameter


def axis_candidates(cover: BoxCover, axis: int) -> list[Fraction]:
    pts = {ZERO, ONE}
    for _, region in cover.members:
        for b in region:
            for e in b.endpoints(axis):
                if ZERO <= e <= ONE:
                    pts.add(e)
    pts = sorted(pts)
    mids = [(p + q) / 2 for p, q in zip(pts, pts[1:])]
    return sorted(set(pts) | set(mids))


def _scale(values) -> int:
    return math.lcm(*(v.denominator for v in values))


def _axis_mask(cand: np.ndarray, lo: int, hi: int, lo_open: bool, hi_open: bool) -> np.ndarray:
    above = cand > lo if lo_open else cand >= lo
    below = cand < hi if hi_open else cand <= hi
    return np.asarray(above & below, dtype=bool)


def membership_grids(cover: BoxCover):
    """Candidate lists per axis and one boolean grid per member."""
    dim = cover.dim
    cands = [axis_candidates(cover, i) for i in range(dim)]
    ends = [e for _, r in cover.members for b in r for e in b.lo + b.hi]
    D = _scale([c for axis in cands for c in axis] + ends)
    icands = [np.array([int(c * D) for c in axis], dtype=object if D > 2**60 else np.int64)
              for axis in cands]
    shape = tuple(len(c) for c in cands)
    grids = []
    for label, region in cover.members:
        acc = np.zeros(shape, dtype=bool)
        for b in region:
            m = np.ones(shape, dtype=bool)
            for i in range(dim):
                mask = _axis_mask(icands[i], int(b.lo[i] * D), int(b.hi[i] * D),
                                  b.lo_open[i], b.hi_open[i])
                m &= mask.reshape((1,) * i + (-1,) + (1,) * (dim - i - 1))
            acc |= m
        grids.append((label, acc))
    return cands, grids


def multiplicity_grid(cover: BoxCover):
    cands, grids = membership_grids(cover)
    mult = np.zeros(tuple(len(c) for c in cands), dtype=np.int64)
    for _, g in grids:
        mult += g
    return cands, mult


def covers_unit_cube(cover: BoxCover) -> bool:
    _, mult = multiplicity_grid(cover)
    return bool(mult.min() >= 1)


def uncovered_point(cover: BoxCover):
    """A point of [0,1]^N outside every member, or None."""
    cands, mult = multiplicity_grid(cover)
    hits = np.argwhere(mult == 0)
    if hits.size == 0:
        return None
    return tuple(cands[i][int(j)] for i, j in enumerate(hits[0]))


def max_multiplicity_point(cover: BoxCover) -> tuple[tuple[Fraction, ...], list]:
    """A point lying in the most members, with the full list of those members.

    Among maximisers on the candidate grid the lexicographically least point
    is returned.
    """
    cands, mult = multiplicity_grid(cover)
    if mult.min() < 1:
        raise ValueError("cover does not cover the unit cube")
    flat = int(np.argmax(mult))
    pos = np.unravel_index(flat, mult.shape)
    x = tuple(cands[i][int(j)] for i, j in enumerate(pos))
    return x, cover.containing(x)


def random_open_cover(dim: int, seed: int, denominator: int = 24, merge_prob: float = 0.3,
                      max_cells: int = 4) -> BoxCover:
    """Seeded cover of [0,1]^N by relatively open rational boxes of diameter < 1.

    A random product grid (gaps at most 7/12) is fattened by open margins of
    1/D or 2/D; some pairs of cells are merged into one member when the union
    keeps diameter below 1.
    """
    rng = np.random.default_rng(seed)
    D = denominator
    max_gap = (7 * D) // 12
    axes = []
    for _ in range(dim):
        while True:
            k = int(rng.integers(2, max_cells + 1))
            cuts = sorted(int(c) for c in rng.choice(np.arange(1, D), size=k - 1, replace=False))
            edges = [0] + cuts + [D]
            if max(b - a for a, b in zip(edges, edges[1:])) <= max_gap:
                break
        axes.append(list(zip(edges, edges[1:])))
    boxes = []
    for cell in np.ndindex(*(len(a) for a in axes)):
        lo, hi, lo_o, hi_o = [], [], [], []
        for i, j in enumerate(cell):
            a, b = axes[i][j]
            a -= int(rng.integers(1, 3))
            b += int(rng.integers(1, 3))
            lo.append(Fraction(max(a, 0), D)); lo_o.append(a > 0)
            hi.append(Fraction(min(b, D), D)); hi_o.append(b < D)
        boxes.append(RationalBox(tuple(lo), tuple(hi), tuple(lo_o), tuple(hi_o)))
    order = rng.permutation(len(boxes)).tolist()
    regions = []
    i = 0
    while i < len(order):
        region = (boxes[order[i]],)
        if i + 1 < len(order) and rng.random() < merge_prob:
            merged = region + (boxes[order[i + 1]],)
            if region_diameter(merged) < 1:
                region = merged
                i += 1
        regions.append(region)
        i += 1
    return BoxCover(dim, tuple(enumerate(regions)))


def member_multiplicity(cover: BoxCover, point) -> int:
    return len(cover.containing(point))


def sorted_labels(labels) -> list:
    return sorted(labels, key=label_key)
