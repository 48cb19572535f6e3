"""Adaptive dyadic refinement of [0,1]^N against a box cover.

A cube that fits inside some member is frozen; any other cube is split into
its 2^N children.  Frozen cubes are the leaves of a finite tree whose depth is
capped by ``max_level``; cubes still unfitted at the cap are kept as refused
leaves so a too-shallow run degrades into a flagged partial result.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .covers.boxes import BoxCover, RationalBox, label_key, region_contains, region_contains_box

ACCEPTED = "accepted"
REFUSED = "refused"


@dataclass(frozen=True, order=True)
class DyadicCube:
    level: int
    corner: tuple[int, ...]

    def __post_init__(self):
        side = 1 << self.level
        if any(not 0 <= c < side for c in self.corner):
            raise ValueError(f"corner {self.corner} outside level {self.level}")

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def diameter(self) -> Fraction:
        return self.side

    def volume(self) -> Fraction:
        return self.side ** self.dim

    def box(self) -> RationalBox:
        s = self.side
        return RationalBox.closed(tuple(c * s for c in self.corner),
                                  tuple((c + 1) * s for c in self.corner))

    def children(self) -> list["DyadicCube"]:
        return [DyadicCube(self.level + 1, tuple(2 * c + b for c, b in zip(self.corner, bits)))
                for bits in itertools.product((0, 1), repeat=self.dim)]

    def integer_extent(self, level: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Corner coordinates of the cube in units of ``2**-level``."""
        f = 1 << (level - self.level)
        return tuple(c * f for c in self.corner), tuple((c + 1) * f for c in self.corner)

    def vertices(self) -> list[tuple[Fraction, ...]]:
        b = self.box()
        return [tuple(b.hi[i] if bit else b.lo[i] for i, bit in enumerate(bits))
                for bits in itertools.product((0, 1), repeat=self.dim)]


@dataclass(frozen=True)
class Leaf:
    cube: DyadicCube
    status: str
    label: object = None

    def to_record(self) -> dict:
        return {"level": self.cube.level, "corner": list(self.cube.corner),
                "status": self.status, "label": self.label}


@dataclass
class SubdivisionTree:
    dim: int
    max_level: int
    leaves: list = field(default_factory=list)
    internal: int = 0

    @property
    def accepted(self) -> list[Leaf]:
        return [l for l in self.leaves if l.status == ACCEPTED]

    @property
    def refused(self) -> list[Leaf]:
        return [l for l in self.leaves if l.status == REFUSED]

    @property
    def complete(self) -> bool:
        return not self.refused

    def depth(self) -> int:
        return max(l.cube.level for l in self.leaves)

    def leaf_volume(self, status: str | None = ACCEPTED) -> Fraction:
        return sum((l.cube.volume() for l in self.leaves
                    if status is None or l.status == status), Fraction(0))

    def to_jsonl(self) -> str:
        return "".join(json.dumps(l.to_record()) + "\n" for l in self.leaves)


def _fitting_labels(cover: BoxCover, box: RationalBox) -> list:
    hits = [label for label, region in cover.members if any(b.contains_box(box) for b in region)]
    if not hits:
        hits = [label for label, region in cover.members if region_contains_box(region, box)]
    return sorted(hits, key=label_key)


def adaptive_subdivide(cover: BoxCover, max_level: int = 20, threads: int = 1) -> SubdivisionTree:
    """Breadth-first refinement; cubes fitting a member are frozen with the least
    fitting label, cubes still unfitted at ``max_level`` are refused.

    Leaves come back sorted by ``(level, corner)`` whatever ``threads`` is.
    """
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    tree = SubdivisionTree(cover.dim, max_level)
    frontier = [DyadicCube(0, (0,) * cover.dim)]
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while frontier:
            boxes = [c.box() for c in frontier]
            if pool is None:
                fits = [_fitting_labels(cover, b) for b in boxes]
            else:
                fits = list(pool.map(lambda b: _fitting_labels(cover, b), boxes))
            nxt = []
            for cube, labels in zip(frontier, fits):
                if labels:
                    tree.leaves.append(Leaf(cube, ACCEPTED, labels[0]))
                elif cube.level >= max_level:
                    tree.leaves.append(Leaf(cube, REFUSED))
                else:
                    tree.internal += 1
                    nxt.extend(cube.children())
            frontier = sorted(nxt)
    finally:
        if pool is not None:
            pool.shutdown()
    tree.leaves.sort(key=lambda l: l.cube)
    return tree


def well_founded_check(tree: SubdivisionTree) -> tuple[bool, int]:
    return tree.complete, tree.depth()


def verify_leaves(tree: SubdivisionTree, cover: BoxCover) -> list[Leaf]:
    """Accepted leaves that are not inside the member they were fitted to."""
    return [l for l in tree.accepted
            if not region_contains_box(cover.region(l.label), l.cube.box())]


def _extents(leaves: list[Leaf]) -> tuple[np.ndarray, np.ndarray, int]:
    top = max(l.cube.level for l in leaves)
    ext = [l.cube.integer_extent(top) for l in leaves]
    lo = np.array([e[0] for e in ext], dtype=np.int64)
    hi = np.array([e[1] for e in ext], dtype=np.int64)
    return lo, hi, top


def face_violations(tree: SubdivisionTree) -> list[tuple[DyadicCube, DyadicCube]]:
    """Pairs of touching leaves whose intersection is not a face of both."""
    leaves = tree.leaves
    if len(leaves) < 2:
        return []
    lo, hi, _ = _extents(leaves)
    out = []
    for i in range(len(leaves) - 1):
        jlo = np.maximum(lo[i], lo[i + 1:])
        jhi = np.minimum(hi[i], hi[i + 1:])
        touch = (jlo <= jhi).all(axis=1)

        def is_face(a_lo, a_hi):
            full = (jlo == a_lo) & (jhi == a_hi)
            point = (jlo == jhi) & ((jlo == a_lo) | (jlo == a_hi))
            return (full | point).all(axis=1)

        ok = is_face(lo[i], hi[i]) & is_face(lo[i + 1:], hi[i + 1:])
        for j in np.flatnonzero(touch & ~ok):
            out.append((leaves[i].cube, leaves[i + 1 + int(j)].cube))
    return out


@dataclass
class ColourStats:
    vertex_colours: dict
    cube_counts: list  # (cube, number of colours)
    max_count: int
    histogram: dict
    face_violations: int

    def to_dict(self) -> dict:
        return {
            "vertices": len(self.vertex_colours),
            "max_count": self.max_count,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "face_violations": self.face_violations,
            "cubes": [{"level": c.level, "corner": list(c.corner), "colours": k}
                      for c, k in self.cube_counts],
        }


def complex_colour_stats(tree: SubdivisionTree, cover: BoxCover) -> ColourStats:
    """Colour every vertex of the leaf complex by its least containing member and
    count the colours met by each closed leaf.

    Vertices of smaller neighbours that sit on a leaf's boundary count for that
    leaf too, so hanging vertices are not lost.
    """
    if not tree.complete:
        raise ValueError("tree has refused leaves")
    leaves = tree.leaves
    lo, hi, top = _extents(leaves)
    scale = 1 << top
    verts = sorted({v for l in leaves
                    for v in itertools.product(*zip(*l.cube.integer_extent(top)))})
    labels = sorted(cover.labels, key=label_key)
    colour = {}
    for v in verts:
        p = tuple(Fraction(c, scale) for c in v)
        for lab in labels:
            if region_contains(cover.region(lab), p):
                colour[v] = lab
                break
        else:
            raise ValueError(f"vertex {tuple(str(c) for c in p)} is not covered")
    varr = np.array(verts, dtype=np.int64)
    vcol = [colour[v] for v in verts]
    counts = []
    for k, leaf in enumerate(leaves):
        inside = ((varr >= lo[k]) & (varr <= hi[k])).all(axis=1)
        counts.append((leaf.cube, len({vcol[i] for i in np.flatnonzero(inside)})))
    hist = Counter(k for _, k in counts)
    return ColourStats(
        vertex_colours={tuple(Fraction(c, scale) for c in v): colour[v] for v in verts},
        cube_counts=counts,
        max_count=max(hist),
        histogram=dict(hist),
        face_violations=len(face_violations(tree)),
    )


def refines(fine: SubdivisionTree, coarse: SubdivisionTree) -> bool:
    """Every leaf of ``fine`` lies in a leaf of ``coarse`` and accepted coarse
    leaves reappear unchanged."""
    accepted = {l.cube for l in coarse.accepted}
    if not accepted <= {l.cube for l in fine.accepted}:
        return False
    cubes = {l.cube for l in coarse.leaves}
    for leaf in fine.leaves:
        c = leaf.cube
        while c not in cubes:
            if c.level == 0:
                return False
            c = DyadicCube(c.level - 1, tuple(x // 2 for x in c.corner))
    return True


def leaves_from_jsonl(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def iter_leaf_boxes(tree: SubdivisionTree) -> Iterable[RationalBox]:
    for leaf in tree.leaves:
        yield leaf.cube.box()
