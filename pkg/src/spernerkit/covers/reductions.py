"""Passing between Sperner colourings of [n]^N and box covers of [0,1]^N."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable

import numpy as np

from ..labelings import Colouring, check_cubical_sperner
from ..lattice import GridSet, Index, grid, local_lebesgue, positive_cube, sup_distance
from .boxes import ONE, ZERO, BoxCover, RationalBox, label_key, region_contains
from .witness import max_multiplicity_point, uncovered_point

_TWO_THIRDS = Fraction(2, 3)


def grid_interval(s: int, n: int) -> tuple[Fraction, Fraction, bool, bool]:
    """``(lo, hi, lo_open, hi_open)`` of the axis interval around ``s / n``.

    Interior values get ``](s-2/3)/n, (s+2/3)/n[``; the ends get ``[0, 1/n[``
    and ``]1-1/n, 1]``.
    """
    if not 0 <= s <= n:
        raise ValueError(f"{s} outside [0, {n}]")
    if s == 0:
        return ZERO, Fraction(1, n), False, True
    if s == n:
        return ONE - Fraction(1, n), ONE, True, False
    return (s - _TWO_THIRDS) / n, (s + _TWO_THIRDS) / n, True, True


def g_sigma(sigma: Index) -> RationalBox:
    """The open product box attached to a grid index."""
    parts = [grid_interval(s, sigma.n) for s in sigma]
    return RationalBox(
        tuple(p[0] for p in parts), tuple(p[1] for p in parts),
        tuple(p[2] for p in parts), tuple(p[3] for p in parts),
    )


def colouring_to_cover(phi: Colouring) -> BoxCover:
    """One member per colour: the union of the boxes of all indices with that colour.

    Refuses colourings that break the Sperner condition, because then some
    member would reach diameter 1.
    """
    bad = check_cubical_sperner(phi)
    if bad is not None:
        a, b = bad
        raise ValueError(
            f"colouring violates the Sperner condition at {a.to_text()} / {b.to_text()}"
        )
    regions: dict[int, list] = {}
    for sigma, c in phi.items():
        regions.setdefault(c, []).append(g_sigma(sigma))
    return BoxCover(phi.dim, tuple((c, tuple(regions[c])) for c in sorted(regions)))


def grid_point(sigma: Index) -> tuple[Fraction, ...]:
    return tuple(Fraction(c, sigma.n) for c in sigma)


def cover_to_colouring(cover: BoxCover, n: int) -> Colouring:
    """Colour each grid point ``sigma / n`` by the least member label containing it.

    Non-negative integer labels are used as colour ids directly; otherwise a
    label's rank in sorted label order is its colour.
    """
    labels = sorted(cover.labels, key=label_key)
    if all(isinstance(l, (int, np.integer)) and l >= 0 for l in labels):
        colour = {l: int(l) for l in labels}
    else:
        colour = {l: i for i, l in enumerate(labels)}
    ordered = [(l, cover.region(l)) for l in labels]
    arr = np.empty((n + 1,) * cover.dim, dtype=np.int64)
    for sigma in grid(cover.dim, n):
        p = grid_point(sigma)
        for l, region in ordered:
            if region_contains(region, p):
                arr[sigma.coords] = colour[l]
                break
        else:
            raise ValueError(f"grid point {sigma.to_text()} is not covered")
    return Colouring(cover.dim, n, arr)


def infimum_cube_recovery(sigmas: Iterable[Index]) -> Index:
    """Coordinatewise minimum of indices that pairwise differ by at most 1."""
    sigmas = sorted(set(sigmas))
    if not sigmas:
        raise ValueError("need at least one index")
    for a, b in itertools.combinations(sigmas, 2):
        if sup_distance(a, b) > 1:
            raise ValueError(
                f"{a.to_text()} and {b.to_text()} are at distance {sup_distance(a, b)} > 1"
            )
    n = sigmas[0].n
    return Index(n, tuple(min(c) for c in zip(*sigmas)))


def _axis_hits(x: Fraction, n: int) -> list[int]:
    out = []
    for s in range(n + 1):
        lo, hi, lo_o, hi_o = grid_interval(s, n)
        if (lo < x or (x == lo and not lo_o)) and (x < hi or (x == hi and not hi_o)):
            out.append(s)
    return out


def rich_cube_via_cover(phi: Colouring) -> tuple[Index, set[int]]:
    """Cube found through the cover route, with the colours it is witnessed to carry.

    Builds the cover, takes a point of maximal multiplicity, picks for each
    colour met there the lexicographically least index whose box contains the
    point, and returns the cube anchored at the coordinatewise minimum.
    """
    cover = colouring_to_cover(phi)
    x, _ = max_multiplicity_point(cover)
    n = phi.n
    choices = [_axis_hits(xi, n) for xi in x]
    picked: dict[int, Index] = {}
    for coords in itertools.product(*choices):
        sigma = Index(n, coords)
        c = phi.colour_of(sigma)
        if c not in picked:
            picked[c] = sigma
    sigma = infimum_cube_recovery(picked.values())
    cube = set(positive_cube(sigma))
    assert all(s in cube for s in picked.values())
    return sigma, set(picked)


def grid_image(cover: BoxCover, scale: int) -> list[tuple[object, GridSet]]:
    """For each member U, the set of grid indices ``rho`` with ``rho / scale`` in U."""
    pts = list(grid(cover.dim, scale))
    out = []
    for label, region in cover.members:
        inside = [p.coords for p in pts if region_contains(region, grid_point(p))]
        out.append((label, GridSet.from_points(cover.dim, scale, inside)))
    return out


def check_cover(cover: BoxCover) -> None:
    p = uncovered_point(cover)
    if p is not None:
        raise ValueError(f"point {tuple(str(c) for c in p)} is not covered")


def choose_grid_scale(cover: BoxCover, max_scale: int = 24) -> tuple[int, list]:
    """Smallest grid scale at which the cover's grid image is usable by the
    inductive replay: every member has grid diameter below the scale and every
    grid point has a unit ball inside one member.

    Returns ``(scale, image)``; raises ValueError when no scale up to
    ``max_scale`` qualifies.
    """
    for scale in range(1, max_scale + 1):
        image = grid_image(cover, scale)
        sets = [g for _, g in image]
        if any(g.diameter() >= scale for g in sets):
            continue
        if all(local_lebesgue(p, (), sets) not in (None, 0) for p in grid(cover.dim, scale)):
            return scale, image
    raise ValueError(f"no grid scale up to {max_scale} gives every point a unit ball")
