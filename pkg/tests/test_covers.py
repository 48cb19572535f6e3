import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spernerkit.covers import (
    BoxCover,
    RationalBox,
    box_diameter,
    choose_grid_scale,
    colouring_to_cover,
    cover_to_colouring,
    covers_unit_cube,
    g_sigma,
    grid_interval,
    infimum_cube_recovery,
    max_multiplicity_point,
    random_open_cover,
    region_contains,
    region_contains_box,
    region_diameter,
    rich_cube_via_cover,
)
from spernerkit.labelings import (
    Colouring,
    check_cubical_sperner,
    cube_palette,
    max_colours_per_cube,
    random_sperner_colouring,
)
from spernerkit.lattice import Index, grid, positive_cube

import oracles


def closed(*pairs):
    return RationalBox.closed(tuple(F(a) for a, _ in pairs), tuple(F(b) for _, b in pairs))


def test_box_diameter_examples():
    assert box_diameter((closed(*[(0, F(1, 3))] * 3),)) == F(1, 3)
    assert box_diameter((closed((0, F(1, 4))), closed((F(3, 4), 1)))) == 1
    g = g_sigma(Index(3, (1, 1)))
    assert g.lo == (F(1, 9),) * 2 and g.hi == (F(5, 9),) * 2
    assert all(g.lo_open) and all(g.hi_open)
    assert box_diameter((g,)) == F(4, 9)
    with pytest.raises(ValueError):
        region_diameter(())


def test_grid_intervals():
    assert grid_interval(0, 3) == (F(0), F(1, 3), False, True)
    assert grid_interval(3, 3) == (F(2, 3), F(1), True, False)
    for n in (2, 3, 4):
        for s in range(1, n):
            lo, hi, lo_o, hi_o = grid_interval(s, n)
            assert (lo, hi) == ((s - F(2, 3)) / n, (s + F(2, 3)) / n) and lo_o and hi_o


def test_colouring_to_cover_injective_line():
    phi = Colouring(1, 2, np.array([0, 1, 2]))
    cover = colouring_to_cover(phi)
    assert cover.labels == [0, 1, 2]
    # direct interval arithmetic: [0,1/2[, ]1/6,5/6[, ]1/2,1]
    expected = {0: F(1, 2) - 0, 1: F(5, 6) - F(1, 6), 2: 1 - F(1, 2)}
    assert cover.diameters() == expected == {0: F(1, 2), 1: F(2, 3), 2: F(1, 2)}


@pytest.mark.parametrize("seed", range(10))
def test_centres_lie_in_their_boxes(seed):
    dim, n = 1 + seed % 3, 2 + seed % 3
    phi = random_sperner_colouring(dim, n, seed, "wide")
    cover = colouring_to_cover(phi)
    for sigma in grid(dim, n):
        x = tuple(F(c, n) for c in sigma)
        assert g_sigma(sigma).contains(x)
        assert phi.colour_of(sigma) in cover.containing(x)
        # no other box G_tau contains the centre of G_sigma
        hits = [t for t in grid(dim, n) if g_sigma(t).contains(x)]
        assert hits == [sigma]


def _class_diameter(phi, colour):
    return region_diameter(tuple(g_sigma(s) for s, c in phi.items() if c == colour))


@pytest.mark.parametrize("seed", range(30))
def test_diameter_below_one_iff_sperner(seed):
    rng = np.random.default_rng(seed)
    dim, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
    phi = random_sperner_colouring(dim, n, seed, ("binary", "wide", "few")[seed % 3])
    if seed % 2:
        # mutate: copy a colour across an opposite pair
        arr = phi.colours.copy()
        a = (0,) * dim
        b = (n,) + (0,) * (dim - 1)
        arr[b] = arr[a]
        phi = Colouring(dim, n, arr)
    valid = check_cubical_sperner(phi) is None
    small = all(_class_diameter(phi, c) < 1 for c in phi.palette)
    assert valid == small
    if valid:
        assert max(colouring_to_cover(phi).diameters().values()) < 1
    else:
        with pytest.raises(ValueError):
            colouring_to_cover(phi)


def test_cover_to_colouring_examples():
    n = 2
    eps = F(1, 10)
    members = []
    for k, sigma in enumerate(grid(2, n)):
        lo = tuple(max(F(0), F(c, n) - eps) for c in sigma)
        hi = tuple(min(F(1), F(c, n) + eps) for c in sigma)
        members.append((k, (RationalBox.closed(lo, hi),)))
    tiny = BoxCover(2, tuple(members))
    phi = cover_to_colouring(tiny, n)
    assert len(set(phi.colours.reshape(-1).tolist())) == 9

    wide = BoxCover(1, ((0, (closed((0, 1)),)), (1, (closed((F(1, 3), F(2, 3))),))))
    assert wide.diameters()[0] == 1
    assert check_cubical_sperner(cover_to_colouring(wide, 3)) is not None

    gap = BoxCover(1, ((0, (closed((0, F(1, 3))),)),))
    with pytest.raises(ValueError):
        cover_to_colouring(gap, 3)


@pytest.mark.parametrize("dim,n", [(d, n) for d in (1, 2, 3) for n in (2, 3, 4)])
def test_round_trip_identity(dim, n):
    for seed in range(3):
        phi = random_sperner_colouring(dim, n, seed, "wide")
        back = cover_to_colouring(colouring_to_cover(phi), n)
        assert back == phi


@pytest.mark.parametrize("seed", range(20))
def test_small_covers_give_sperner_colourings(seed):
    dim = 1 + seed % 2
    cover = random_open_cover(dim, seed)
    assert max(cover.diameters().values()) < 1
    for n in (2, 3, 5):
        assert check_cubical_sperner(cover_to_colouring(cover, n)) is None


def test_max_multiplicity_examples():
    whole = BoxCover(2, ((0, (RationalBox.unit(2),)),))
    assert max_multiplicity_point(whole)[1] == [0]
    two = BoxCover(1, ((0, (closed((0, F(2, 3))),)), (1, (closed((F(1, 3), 1)),))))
    x, labels = max_multiplicity_point(two)
    assert labels == [0, 1] and F(1, 3) <= x[0] <= F(2, 3)
    assert x == (F(1, 3),)  # lexicographically least maximiser
    with pytest.raises(ValueError):
        max_multiplicity_point(BoxCover(1, ((0, (closed((0, F(1, 2))),)),)))


@pytest.mark.parametrize("seed", range(40))
def test_max_multiplicity_matches_lattice(seed):
    dim = 1 + seed % 2
    cover = random_open_cover(dim, seed)
    assert covers_unit_cube(cover)
    x, labels = max_multiplicity_point(cover)
    mult, D = oracles.multiplicity_lattice(cover)
    assert len(labels) == mult.max() >= dim + 1
    assert labels == sorted(l for l, r in cover.members
                            if any(oracles.box_has(oracles.axes_of(b), x) for b in r))


def test_infimum_examples():
    s = infimum_cube_recovery([Index(2, (2, 1)), Index(2, (1, 2))])
    assert s == Index(2, (1, 1))
    cube = set(positive_cube(s))
    assert Index(2, (2, 1)) in cube and Index(2, (1, 2)) in cube
    assert infimum_cube_recovery([Index(3, (1, 2))]) == Index(3, (1, 2))
    with pytest.raises(ValueError):
        infimum_cube_recovery([Index(2, (0, 0)), Index(2, (2, 0))])
    with pytest.raises(ValueError):
        infimum_cube_recovery([])


def test_rich_cube_line():
    phi = Colouring(1, 2, np.array([0, 1, 2]))
    sigma, colours = rich_cube_via_cover(phi)
    assert len(colours) == 2 == max_colours_per_cube(phi)[1]
    assert colours <= cube_palette(phi, sigma)


@pytest.mark.parametrize("seed", range(24))
def test_rich_cube_dominance(seed):
    dim, n = 1 + seed % 3, 2 + (seed // 3) % 3
    phi = random_sperner_colouring(dim, n, seed, ("binary", "wide", "few")[seed % 3])
    sigma, colours = rich_cube_via_cover(phi)
    assert colours <= cube_palette(phi, sigma)
    assert dim + 1 <= len(colours) <= max_colours_per_cube(phi)[1]


rationals = st.fractions(min_value=0, max_value=1, max_denominator=6)


@st.composite
def boxes(draw, dim):
    axes = []
    for _ in range(dim):
        a, b = sorted((draw(rationals), draw(rationals)))
        axes.append((a, b, draw(st.booleans()), draw(st.booleans())))
    return RationalBox(*(tuple(ax[k] for ax in axes) for k in range(4)))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_region_contains_box_matches_oracle(data):
    dim = data.draw(st.integers(1, 2))
    target = data.draw(boxes(dim))
    region = tuple(data.draw(boxes(dim)) for _ in range(data.draw(st.integers(1, 3))))
    expect = oracles.interval_cells_contained(oracles.axes_of(target),
                                              [oracles.axes_of(b) for b in region])
    assert region_contains_box(region, target) == expect
    inter = region[0].intersect(target)
    assert (inter is not None) == oracles.boxes_meet([oracles.axes_of(region[0]),
                                                     oracles.axes_of(target)])


def test_box_and_cover_validation():
    with pytest.raises(ValueError):
        RationalBox.closed((F(1, 2),), (F(1, 3),))
    b = closed((0, 1))
    with pytest.raises(ValueError):
        BoxCover(1, ((0, (b,)), (0, (b,))))
    empty = RationalBox((F(1, 2),), (F(1, 2),), (True,), (False,))
    assert empty.is_empty()
    with pytest.raises(ValueError):
        BoxCover(1, ((0, (empty,)),))
    assert region_contains((b,), (F(1),)) and not region_contains((b,), (F(2),))


def test_grid_scale_for_injective_colouring():
    phi = Colouring(2, 3, np.arange(16).reshape(4, 4))
    scale, image = choose_grid_scale(colouring_to_cover(phi))
    sets = [g for _, g in image]
    assert all(g.diameter() < scale for g in sets)
    with pytest.raises(ValueError):
        choose_grid_scale(colouring_to_cover(phi), max_scale=scale - 1)
