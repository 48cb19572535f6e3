"""Approximate fixed points of self-maps of [0,1]^N from sign colourings.

Each grid vertex ``v = sigma/m`` gets the colour whose bit i records whether
``f(v)_i >= v_i``.  Bits are forced to 1 on the face ``sigma_i = 0`` and to 0
on ``sigma_i = m``; both overrides agree with the weak inequalities there, so
bit 1 always means ``f(v)_i >= v_i`` and bit 0 means ``f(v)_i <= v_i``.  A grid
cube whose vertices show both bit values on every axis brackets a zero of
``f(x) - x`` up to the oscillation of ``f`` over the cube.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .labelings import Colouring, encode_bits
from .lattice import CoordSet, Index

Point = tuple  # tuple[Fraction, ...]


def _clip(x: Fraction) -> Fraction:
    return min(Fraction(1), max(Fraction(0), x))


@dataclass(frozen=True)
class GridMap:
    dim: int
    fn: Callable[[Point], Sequence]
    name: str = "map"
    lipschitz: Fraction | None = None
    fixed_points: tuple = ()  # known fixed points, when the map has any on record

    def __call__(self, x: Sequence) -> Point:
        x = tuple(Fraction(c) for c in x)
        y = tuple(Fraction(c) for c in self.fn(x))
        if len(y) != self.dim or any(not 0 <= c <= 1 for c in y):
            raise ValueError(f"{self.name} left the unit cube at {tuple(map(str, x))}")
        return y


def identity_map(dim: int) -> GridMap:
    return GridMap(dim, lambda x: x, "identity", Fraction(1))


def constant_map(c: Sequence) -> GridMap:
    c = tuple(Fraction(v) for v in c)
    return GridMap(len(c), lambda x: c, "const", Fraction(0), (c,))


def square_map(dim: int) -> GridMap:
    corners = tuple(tuple(Fraction(b) for b in bits) for bits in itertools.product((0, 1), repeat=dim))
    return GridMap(dim, lambda x: tuple(v * v for v in x), "square", Fraction(2), corners)


def rotation_map(t: int = 10) -> GridMap:
    """Rotation of the square about its centre by the angle with
    ``cos = (t^2-1)/(t^2+1)``, ``sin = 2t/(t^2+1)``, clipped back into the square."""
    cos = Fraction(t * t - 1, t * t + 1)
    sin = Fraction(2 * t, t * t + 1)
    h = Fraction(1, 2)

    def fn(x):
        a, b = x[0] - h, x[1] - h
        return (_clip(h + cos * a - sin * b), _clip(h + sin * a + cos * b))

    return GridMap(2, fn, "rotate", Fraction(1), ((h, h),))


def _poly_fixed_point(coeffs) -> Fraction | None:
    if len(coeffs) == 2 and coeffs[1] != 1:
        x = coeffs[0] / (1 - coeffs[1])
        if 0 <= x <= 1:
            return x
    return None


def polynomial_map(coeffs: Sequence[Sequence]) -> GridMap:
    """Per-axis polynomial ``sum_j coeffs[i][j] * x_i**j``, clipped to [0, 1]."""
    cs = tuple(tuple(Fraction(c) for c in row) for row in coeffs)

    def fn(x):
        return tuple(_clip(sum(c * v ** j for j, c in enumerate(row))) for row, v in zip(cs, x))

    lip = max(sum(abs(c) * j for j, c in enumerate(row)) for row in cs)
    roots = [_poly_fixed_point(row) for row in cs]
    fixed = (tuple(roots),) if all(r is not None for r in roots) else ()
    return GridMap(len(cs), fn, "poly", lip, fixed)


def shift_map(dim: int, axis: int, amount) -> GridMap:
    """Adds ``amount`` to one coordinate and clips; the rest are left alone."""
    s = Fraction(amount)

    def fn(x):
        return tuple(_clip(v + s) if i == axis else v for i, v in enumerate(x))

    return GridMap(dim, fn, "shift", Fraction(1))


def _fractions(text: str) -> list[Fraction]:
    return [Fraction(p) for p in text.split(",") if p]


def make_map(name: str, dim: int, params: dict | None = None) -> GridMap:
    """Build a named test map.  ``params`` values are strings as they come off
    the command line, e.g. ``c="1/3,2/3"`` or ``coeffs="1/4,1/2;1/3,1/3"``."""
    p = dict(params or {})
    if name == "identity":
        return identity_map(dim)
    if name == "const":
        c = _fractions(p.get("c", "1/3"))
        return constant_map(c * dim if len(c) == 1 else c)
    if name == "square":
        return square_map(dim)
    if name == "rotate":
        if dim != 2:
            raise ValueError("rotate is defined for N=2")
        return rotation_map(int(p.get("t", 10)))
    if name == "poly":
        rows = [_fractions(r) for r in p.get("coeffs", "1/4,1/2").split(";")]
        return polynomial_map(rows * dim if len(rows) == 1 else rows)
    if name == "shift":
        return shift_map(dim, int(p.get("axis", 0)), Fraction(p.get("amount", "1/4")))
    raise ValueError(f"unknown map {name!r}")


BUILTIN_MAPS = ("identity", "const", "square", "rotate", "poly", "shift")


class _Labeller:
    def __init__(self, f: GridMap, m: int):
        self.f, self.m = f, m
        self.cache: dict = {}

    def bits(self, sigma: tuple) -> tuple[int, ...]:
        b = self.cache.get(sigma)
        if b is None:
            m = self.m
            v = tuple(Fraction(s, m) for s in sigma)
            y = self.f(v)
            b = tuple(1 if s == 0 else 0 if s == m else int(yi >= vi)
                      for s, yi, vi in zip(sigma, y, v))
            self.cache[sigma] = b
        return b


def sign_labeling(f: GridMap, m: int) -> Colouring:
    if m < 1:
        raise ValueError("m must be positive")
    lab = _Labeller(f, m)
    arr = np.empty((m + 1,) * f.dim, dtype=np.int64)
    for sigma in itertools.product(range(m + 1), repeat=f.dim):
        arr[sigma] = encode_bits(lab.bits(sigma))
    return Colouring(f.dim, m, arr)


def _sign_change_cubes(lab: _Labeller, dim: int):
    m = lab.m
    for sigma in itertools.product(range(m), repeat=dim):
        seen_one = [False] * dim
        seen_zero = [False] * dim
        for tau in itertools.product((0, 1), repeat=dim):
            b = lab.bits(tuple(s + t for s, t in zip(sigma, tau)))
            for i, bit in enumerate(b):
                if bit:
                    seen_one[i] = True
                else:
                    seen_zero[i] = True
        if all(seen_one) and all(seen_zero):
            yield sigma


def residual(f: GridMap, x: Sequence) -> Fraction:
    """``max_i |f(x)_i - x_i|``, evaluated afresh."""
    y = f(x)
    return max(abs(a - b) for a, b in zip(y, x))


@dataclass
class BrouwerResult:
    point: Point
    residual: Fraction
    m: int
    requested_m: int
    escalations: int
    cube: Index | None
    found: bool

    def to_dict(self) -> dict:
        return {
            "point": [str(c) for c in self.point],
            "residual": str(self.residual),
            "residual_float": float(self.residual),
            "m": self.m,
            "requested_m": self.requested_m,
            "escalations": self.escalations,
            "cube": self.cube.to_text() if self.cube else None,
            "found": self.found,
        }


def brouwer_approx(f: GridMap, m: int, max_escalations: int = 4) -> BrouwerResult:
    """Centre of the lexicographically first cube with a sign change on every
    axis.  If none exists at scale ``m``, ``m`` is doubled up to
    ``max_escalations`` times; ``found`` is False when that runs out."""
    scale = m
    for esc in range(max_escalations + 1):
        lab = _Labeller(f, scale)
        for sigma in _sign_change_cubes(lab, f.dim):
            x = tuple(Fraction(2 * s + 1, 2 * scale) for s in sigma)
            return BrouwerResult(x, residual(f, x), scale, m, esc, Index(scale, sigma), True)
        scale *= 2
    half = tuple(Fraction(1, 2) for _ in range(f.dim))
    return BrouwerResult(half, residual(f, half), scale // 2, m, max_escalations, None, False)


def fixed_coordinates(f: GridMap, x: Sequence, eps) -> CoordSet:
    eps = Fraction(eps)
    y = f(x)
    return CoordSet(f.dim, frozenset(i for i, (a, b) in enumerate(zip(y, x)) if abs(a - b) < eps))


@dataclass
class CoordinateExperiment:
    point: Point | None
    coords: CoordSet
    cubes_examined: int
    eps: Fraction
    m: int

    def to_dict(self) -> dict:
        return {
            "point": [str(c) for c in self.point] if self.point else None,
            "fixed_coords": sorted(self.coords.members),
            "count": len(self.coords),
            "cubes_examined": self.cubes_examined,
            "eps": str(self.eps),
            "m": self.m,
        }


def coordinate_fixed_experiment(f: GridMap, eps, m: int) -> CoordinateExperiment:
    """Over every sign-change cube at scale ``m``, the centre with the most
    coordinates moved by less than ``eps`` (first in lexicographic order on ties)."""
    eps = Fraction(eps)
    lab = _Labeller(f, m)
    best_x, best_A, seen = None, CoordSet.empty(f.dim), 0
    for sigma in _sign_change_cubes(lab, f.dim):
        seen += 1
        x = tuple(Fraction(2 * s + 1, 2 * m) for s in sigma)
        A = fixed_coordinates(f, x, eps)
        if best_x is None or len(A) > len(best_A):
            best_x, best_A = x, A
            if len(A) == f.dim:
                break
    return CoordinateExperiment(best_x, best_A, seen, eps, m)
