"""Grid indices of [n]^N and the combinatorial balls built on them.

An :class:`Index` is a point of the finite grid ``[n]^N = {0..n}^N``.  Every
set-valued operation here returns a list sorted lexicographically by
coordinates.  Balls are axis-aligned grid boxes, so containment tests against
a :class:`GridSet` reduce to slicing a boolean array.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class Index:
    """A point of [n]^N.  Ordering is lexicographic in ``coords``."""

    n: int
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.n < 1:
            raise ValueError(f"bound must be >= 1, got {self.n}")
        if len(coords) < 1:
            raise ValueError("an index needs at least one coordinate")
        for i, c in enumerate(coords):
            if not 0 <= c <= self.n:
                raise ValueError(f"coordinate {i} = {c} outside [0, {self.n}]")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def zeros(self) -> int:
        return sum(1 for c in self.coords if c == 0)

    def to_text(self) -> str:
        return f"n={self.n} N={self.dim} : " + ",".join(map(str, self.coords))

    @classmethod
    def from_text(cls, text: str) -> "Index":
        head, _, body = text.partition(":")
        fields = dict(tok.split("=", 1) for tok in head.split())
        try:
            n, dim = int(fields["n"]), int(fields["N"])
            coords = tuple(int(t) for t in body.split(","))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed index text {text!r}") from exc
        if len(coords) != dim:
            raise ValueError(f"expected {dim} coordinates, got {len(coords)}")
        return cls(n, coords)

    @classmethod
    def zero(cls, dim: int, n: int) -> "Index":
        return cls(n, (0,) * dim)


@dataclass(frozen=True)
class CoordSet:
    """A subset of the coordinate axes ``{0, ..., dim-1}``."""

    dim: int
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        object.__setattr__(self, "members", members)
        bad = [i for i in members if not 0 <= i < self.dim]
        if bad:
            raise ValueError(f"coordinates {sorted(bad)} outside [0, {self.dim})")

    def __contains__(self, i):
        return i in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __le__(self, other):
        return self.members <= _members(other)

    def __lt__(self, other):
        return self.members < _members(other)

    def complement(self) -> "CoordSet":
        return CoordSet(self.dim, frozenset(range(self.dim)) - self.members)

    def union(self, other) -> "CoordSet":
        return CoordSet(self.dim, self.members | _members(other))

    def is_full(self) -> bool:
        return len(self.members) == self.dim

    @classmethod
    def full(cls, dim: int) -> "CoordSet":
        return cls(dim, frozenset(range(dim)))

    @classmethod
    def empty(cls, dim: int) -> "CoordSet":
        return cls(dim, frozenset())


def _members(a) -> frozenset:
    return a.members if isinstance(a, CoordSet) else frozenset(a)


def as_coordset(a, dim: int) -> CoordSet:
    if isinstance(a, CoordSet):
        if a.dim != dim:
            raise ValueError(f"coordinate set has dim {a.dim}, expected {dim}")
        return a
    return CoordSet(dim, frozenset(a))


@dataclass(frozen=True)
class AKFunction:
    """An integer perturbation bounded by ``k`` and supported on ``support``."""

    dim: int
    k: int
    values: tuple[int, ...]
    support: CoordSet

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.dim:
            raise ValueError("values length must equal dim")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        for i, v in enumerate(values):
            if abs(v) > self.k:
                raise ValueError(f"value {v} at {i} exceeds bound {self.k}")
            if v != 0 and i not in self.support:
                raise ValueError(f"nonzero value at {i} outside the support")

    def apply(self, sigma: Index) -> Index:
        """``sigma + chi`` clamped into [0, n]."""
        if sigma.dim != self.dim:
            raise ValueError("dimension mismatch")
        n = sigma.n
        return Index(n, tuple(min(n, max(0, s + v)) for s, v in zip(sigma, self.values)))

    @classmethod
    def between(cls, sigma: Index, tau: Index, support) -> "AKFunction":
        """The function ``tau - sigma`` as an (A, k)-function with minimal k."""
        _check_pair(sigma, tau)
        values = tuple(t - s for s, t in zip(sigma, tau))
        k = max((abs(v) for v in values), default=0)
        return cls(sigma.dim, k, values, as_coordset(support, sigma.dim))


class GridSet:
    """A subset of [n]^N held as a dense boolean array of shape ``(n+1,)*N``."""

    __slots__ = ("dim", "n", "mask")

    def __init__(self, dim: int, n: int, mask=None):
        if dim < 1 or n < 1:
            raise ValueError("dim and n must be >= 1")
        shape = (n + 1,) * dim
        if mask is None:
            mask = np.zeros(shape, dtype=bool)
        mask = np.array(mask, dtype=bool)
        if mask.shape != shape:
            raise ValueError(f"mask shape {mask.shape} != {shape}")
        self.dim = dim
        self.n = n
        self.mask = mask
        self.mask.setflags(write=False)

    @classmethod
    def from_points(cls, dim: int, n: int, points: Iterable) -> "GridSet":
        mask = np.zeros((n + 1,) * dim, dtype=bool)
        for p in points:
            coords = tuple(p)
            if len(coords) != dim:
                raise ValueError(f"point {coords} has wrong dimension")
            mask[coords] = True
        return cls(dim, n, mask)

    @classmethod
    def from_predicate(cls, dim: int, n: int, pred: Callable[[Index], bool]) -> "GridSet":
        return cls.from_points(dim, n, (s.coords for s in grid(dim, n) if pred(s)))

    @classmethod
    def full(cls, dim: int, n: int) -> "GridSet":
        return cls(dim, n, np.ones((n + 1,) * dim, dtype=bool))

    @classmethod
    def empty(cls, dim: int, n: int) -> "GridSet":
        return cls(dim, n)

    def __contains__(self, sigma) -> bool:
        coords = tuple(sigma)
        if len(coords) != self.dim or not all(0 <= c <= self.n for c in coords):
            return False
        return bool(self.mask[coords])

    def __len__(self):
        return int(self.mask.sum())

    def __eq__(self, other):
        return (
            isinstance(other, GridSet)
            and (self.dim, self.n) == (other.dim, other.n)
            and np.array_equal(self.mask, other.mask)
        )

    def __repr__(self):
        return f"GridSet(dim={self.dim}, n={self.n}, size={len(self)})"

    def points(self) -> list[Index]:
        return [Index(self.n, tuple(int(c) for c in p)) for p in np.argwhere(self.mask)]

    def contains_box(self, lo: Sequence[int], hi: Sequence[int]) -> bool:
        """True iff every grid point of the box ``lo..hi`` (inclusive) is a member."""
        sl = tuple(slice(a, b + 1) for a, b in zip(lo, hi))
        return bool(self.mask[sl].all())

    def diameter(self) -> int:
        """Sup-metric diameter; -1 for the empty set."""
        if not self.mask.any():
            return -1
        best = 0
        for axis in range(self.dim):
            other = tuple(a for a in range(self.dim) if a != axis)
            present = np.nonzero(self.mask.any(axis=other) if other else self.mask)[0]
            best = max(best, int(present[-1] - present[0]))
        return best


def grid(dim: int, n: int) -> Iterable[Index]:
    """All points of [n]^N in lexicographic order."""
    for coords in itertools.product(range(n + 1), repeat=dim):
        yield Index(n, coords)


def _check_pair(sigma: Index, tau: Index):
    if sigma.n != tau.n or sigma.dim != tau.dim:
        raise ValueError(
            f"index mismatch: (N={sigma.dim}, n={sigma.n}) vs (N={tau.dim}, n={tau.n})"
        )


def truncated_add(sigma: Index, tau: Index) -> Index:
    _check_pair(sigma, tau)
    n = sigma.n
    return Index(n, tuple(min(n, a + b) for a, b in zip(sigma, tau)))


def positive_cube(sigma: Index) -> list[Index]:
    """The vertex set ``{sigma + tau : tau in {0,1}^N}`` of the cube anchored at sigma."""
    n = sigma.n
    axes = [(c,) if c == n else (c, c + 1) for c in sigma]
    return [Index(n, p) for p in itertools.product(*axes)]


def sup_distance(sigma: Index, tau: Index) -> int:
    _check_pair(sigma, tau)
    return max(abs(a - b) for a, b in zip(sigma, tau))


def _check_radius(sigma: Index, k: int):
    if not 0 <= k <= sigma.n:
        raise ValueError(f"radius {k} outside [0, {sigma.n}]")


def ball_box(sigma: Index, free: Iterable[int], k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inclusive bounds of the grid box perturbing ``free`` axes by at most k."""
    free = set(free)
    n = sigma.n
    lo = tuple(max(0, c - k) if i in free else c for i, c in enumerate(sigma))
    hi = tuple(min(n, c + k) if i in free else c for i, c in enumerate(sigma))
    return lo, hi


def _box_points(n: int, lo, hi) -> list[Index]:
    return [Index(n, p) for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))]


def ball(sigma: Index, A, k: int) -> list[Index]:
    """All tau within k of sigma on the axes of A and equal to sigma elsewhere."""
    _check_radius(sigma, k)
    A = as_coordset(A, sigma.dim)
    return _box_points(sigma.n, *ball_box(sigma, A.members, k))


def hat_ball_box(sigma: Index, A, k: int):
    A = as_coordset(A, sigma.dim)
    return ball_box(sigma, A.complement().members, k)


def hat_ball(sigma: Index, A, k: int) -> list[Index]:
    """Points fixed to sigma on A and within k of sigma on every other axis."""
    _check_radius(sigma, k)
    return _box_points(sigma.n, *hat_ball_box(sigma, A, k))


def _check_cover(sigma: Index, cover: Sequence[GridSet]):
    if not cover:
        raise ValueError("cover is empty")
    for g in cover:
        if (g.dim, g.n) != (sigma.dim, sigma.n):
            raise ValueError("cover member does not match the index grid")


def fits_some(lo, hi, cover: Sequence[GridSet]) -> bool:
    return any(g.contains_box(lo, hi) for g in cover)


def local_lebesgue(sigma: Index, A, cover: Sequence[GridSet]) -> int | None:
    """Largest k <= n such that ``hat_ball(sigma, A, k)`` fits one cover member.

    Returns None when sigma itself is uncovered.
    """
    _check_cover(sigma, cover)
    best = None
    for k in range(sigma.n + 1):
        if not fits_some(*hat_ball_box(sigma, A, k), cover):
            break
        best = k
    return best


FAMILY_POLICIES = ("coinfinite", "finite")


def superset_family(A: CoordSet, *, strict: bool = True, policy: str = "coinfinite",
                    cap: int | None = None, seed: int = 0) -> tuple[list[CoordSet], bool]:
    """Finite stand-in for the families of supersets of A.

    ``policy="coinfinite"`` keeps at least one axis outside every member (the
    finite echo of an infinite complement); ``"finite"`` allows the full set.
    Enumeration is exhaustive when the family has at most ``cap`` members,
    otherwise a seeded sample of ``cap`` members is returned.  The second
    return value tells whether sampling happened.
    """
    if policy not in FAMILY_POLICIES:
        raise ValueError(f"unknown family policy {policy!r}")
    free = sorted(A.complement().members)
    total = 1 << len(free)
    if cap is None:
        cap = total if len(free) <= 16 else 4096

    def build(bits: int) -> CoordSet:
        extra = {free[j] for j in range(len(free)) if bits >> j & 1}
        return CoordSet(A.dim, A.members | extra)

    def admissible(bits: int) -> bool:
        if strict and bits == 0:
            return False
        if policy == "coinfinite" and bits == total - 1:
            return False
        return True

    if total <= cap:
        fam = [build(b) for b in range(total) if admissible(b)]
        sampled = False
    else:
        rng = random.Random(seed)
        chosen = set()
        while len(chosen) < cap:
            b = rng.randrange(total)
            if admissible(b):
                chosen.add(b)
        fam = [build(b) for b in chosen]
        sampled = True
    fam.sort(key=lambda s: (len(s), sorted(s.members)))
    return fam, sampled


@dataclass
class PropertyMReport:
    holds: bool
    first_clause: bool
    vacuous: bool
    supersets_checked: int
    sampled: bool
    extensions_checked: int
    witness: tuple | None = None


def property_M_report(sigma: Index, A, k: int, G: GridSet, cover: Sequence[GridSet], *,
                      min_zeros: int = 1, policy: str = "coinfinite",
                      cap: int | None = None, seed: int = 0) -> PropertyMReport:
    """Evaluate property M with its quantifier bookkeeping.

    M holds iff ``hat_ball(sigma, A, k)`` lies inside G and no extension
    sigma' of sigma in that ball (with at least ``min_zeros`` zero
    coordinates) admits a proper superset A' of A whose
    ``hat_ball(sigma', A', k+1)`` fits a cover member.  For ``k >= n`` the
    second clause is vacuous and ``vacuous`` is set.
    """
    _check_cover(sigma, cover)
    A = as_coordset(A, sigma.dim)
    _check_radius(sigma, k)
    first = G.contains_box(*hat_ball_box(sigma, A, k))
    if not first:
        return PropertyMReport(False, False, False, 0, False, 0)
    if k + 1 > sigma.n:
        return PropertyMReport(True, True, True, 0, False, 0)
    family, sampled = superset_family(A, strict=True, policy=policy, cap=cap, seed=seed)
    extensions = [s for s in hat_ball(sigma, A, k) if s.zeros() >= min_zeros]
    for s2 in extensions:
        for A2 in family:
            if fits_some(*hat_ball_box(s2, A2, k + 1), cover):
                return PropertyMReport(False, True, False, len(family), sampled,
                                       len(extensions), (s2, A2))
    return PropertyMReport(True, True, not family or not extensions, len(family), sampled,
                           len(extensions))


def property_M(sigma: Index, A, k: int, G: GridSet, cover: Sequence[GridSet], **kw) -> bool:
    return property_M_report(sigma, A, k, G, cover, **kw).holds
