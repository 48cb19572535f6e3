"""Axis-aligned boxes with exact rational endpoints and per-endpoint openness."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalBox:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    lo_open: tuple[bool, ...]
    hi_open: tuple[bool, ...]

    def __post_init__(self):
        lo = tuple(_frac(x) for x in self.lo)
        hi = tuple(_frac(x) for x in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo_open", tuple(bool(b) for b in self.lo_open))
        object.__setattr__(self, "hi_open", tuple(bool(b) for b in self.hi_open))
        if not len(lo) == len(hi) == len(self.lo_open) == len(self.hi_open):
            raise ValueError("box fields disagree on dimension")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if a > b:
                raise ValueError(f"axis {i}: lower endpoint {a} exceeds upper {b}")

    @classmethod
    def closed(cls, lo: Sequence, hi: Sequence) -> "RationalBox":
        n = len(lo)
        return cls(tuple(lo), tuple(hi), (False,) * n, (False,) * n)

    @classmethod
    def open(cls, lo: Sequence, hi: Sequence) -> "RationalBox":
        n = len(lo)
        return cls(tuple(lo), tuple(hi), (True,) * n, (True,) * n)

    @classmethod
    def unit(cls, dim: int) -> "RationalBox":
        return cls.closed((ZERO,) * dim, (ONE,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def is_empty(self) -> bool:
        return any(
            a == b and (lo_o or hi_o)
            for a, b, lo_o, hi_o in zip(self.lo, self.hi, self.lo_open, self.hi_open)
        )

    def contains(self, point: Sequence) -> bool:
        for x, a, b, lo_o, hi_o in zip(point, self.lo, self.hi, self.lo_open, self.hi_open):
            if x < a or (x == a and lo_o):
                return False
            if x > b or (x == b and hi_o):
                return False
        return True

    __contains__ = contains

    def contains_box(self, other: "RationalBox") -> bool:
        """True iff ``other`` (as a set, openness respected) lies inside self."""
        if other.is_empty():
            return True
        for i in range(self.dim):
            a, b = self.lo[i], self.hi[i]
            c, d = other.lo[i], other.hi[i]
            if c < a or (c == a and self.lo_open[i] and not other.lo_open[i]):
                return False
            if d > b or (d == b and self.hi_open[i] and not other.hi_open[i]):
                return False
        return True

    def intersect(self, other: "RationalBox") -> "RationalBox | None":
        lo, hi, lo_o, hi_o = [], [], [], []
        for i in range(self.dim):
            a, ao = self.lo[i], self.lo_open[i]
            c, co = other.lo[i], other.lo_open[i]
            if a > c:
                lo.append(a); lo_o.append(ao)
            elif c > a:
                lo.append(c); lo_o.append(co)
            else:
                lo.append(a); lo_o.append(ao or co)
            b, bo = self.hi[i], self.hi_open[i]
            d, do = other.hi[i], other.hi_open[i]
            if b < d:
                hi.append(b); hi_o.append(bo)
            elif d < b:
                hi.append(d); hi_o.append(do)
            else:
                hi.append(b); hi_o.append(bo or do)
            if lo[-1] > hi[-1] or (lo[-1] == hi[-1] and (lo_o[-1] or hi_o[-1])):
                return None
        return RationalBox(tuple(lo), tuple(hi), tuple(lo_o), tuple(hi_o))

    def diameter(self) -> Fraction:
        return max(b - a for a, b in zip(self.lo, self.hi))

    def volume(self) -> Fraction:
        v = ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def endpoints(self, axis: int) -> tuple[Fraction, Fraction]:
        return self.lo[axis], self.hi[axis]


Region = tuple  # tuple[RationalBox, ...]


def region_contains(region: Iterable[RationalBox], point) -> bool:
    return any(b.contains(point) for b in region)


def region_diameter(region: Sequence[RationalBox]) -> Fraction:
    """Sup-metric diameter of a union of boxes.

    Openness does not shrink a supremum, so only endpoint values matter.
    """
    boxes = [b for b in region if not b.is_empty()]
    if not boxes:
        raise ValueError("diameter of an empty region")
    dim = boxes[0].dim
    return max(
        max(b.hi[i] for b in boxes) - min(b.lo[i] for b in boxes) for i in range(dim)
    )


box_diameter = region_diameter


def region_intersection(a: Sequence[RationalBox], b: Sequence[RationalBox]) -> tuple:
    out = []
    for x in a:
        for y in b:
            z = x.intersect(y)
            if z is not None:
                out.append(z)
    return tuple(out)


def _axis_breaks(region: Sequence[RationalBox], axis: int, lo: Fraction, hi: Fraction) -> list:
    pts = {lo, hi}
    for b in region:
        for e in b.endpoints(axis):
            if lo < e < hi:
                pts.add(e)
    pts = sorted(pts)
    mids = [(p + q) / 2 for p, q in zip(pts, pts[1:])]
    return sorted(set(pts) | set(mids))


def region_contains_box(region: Sequence[RationalBox], box: RationalBox) -> bool:
    """Exact test that ``box`` lies inside the union ``region``.

    Membership in a union of boxes is constant on the cells of the arrangement
    cut out by the endpoints, so checking one point per cell (breakpoints and
    midpoints between them) is exact.
    """
    if box.is_empty():
        return True
    if any(r.contains_box(box) for r in region):
        return True
    relevant = [r for r in region if r.intersect(box) is not None]
    if not relevant:
        return False
    axes = [_axis_breaks(relevant, i, box.lo[i], box.hi[i]) for i in range(box.dim)]
    for p in itertools.product(*axes):
        if box.contains(p) and not region_contains(relevant, p):
            return False
    return True


@dataclass(frozen=True)
class BoxCover:
    """Labelled finite unions of rational boxes, meant to cover [0,1]^N."""

    dim: int
    members: tuple  # tuple[tuple[label, Region], ...]

    def __post_init__(self):
        members = tuple((label, tuple(region)) for label, region in self.members)
        object.__setattr__(self, "members", members)
        labels = [label for label, _ in members]
        if len(set(labels)) != len(labels):
            dup = sorted({l for l in labels if labels.count(l) > 1}, key=label_key)
            raise ValueError(f"duplicate member labels: {dup}")
        for label, region in members:
            if not region or all(b.is_empty() for b in region):
                raise ValueError(f"member {label!r} is empty")
            for b in region:
                if b.dim != self.dim:
                    raise ValueError(f"member {label!r} has a box of dimension {b.dim}")

    @property
    def labels(self) -> list:
        return [label for label, _ in self.members]

    def region(self, label) -> tuple:
        for l, r in self.members:
            if l == label:
                return r
        raise KeyError(label)

    def containing(self, point) -> list:
        return sorted((l for l, r in self.members if region_contains(r, point)), key=label_key)

    def diameters(self) -> dict:
        return {l: region_diameter(r) for l, r in self.members}

    def __len__(self):
        return len(self.members)


def label_key(label):
    """Sort key putting integer labels (numerically) before string labels."""
    return (1, str(label)) if isinstance(label, str) else (0, label)
