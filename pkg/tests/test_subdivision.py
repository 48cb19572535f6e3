import json
import math
from fractions import Fraction as F

import pytest

from spernerkit.covers import BoxCover, RationalBox, random_open_cover
from spernerkit.subdivision import (
    DyadicCube,
    adaptive_subdivide,
    complex_colour_stats,
    face_violations,
    leaves_from_jsonl,
    refines,
    verify_leaves,
    well_founded_check,
)

import oracles


def half_open_pair(a, b):
    """Members [0, a) and (b, 1] of the unit interval."""
    return BoxCover(1, (
        (0, (RationalBox((F(0),), (F(a),), (False,), (True,)),)),
        (1, (RationalBox((F(b),), (F(1),), (True,), (False,)),)),
    ))


def leaf_map(tree):
    return {(l.cube.level, l.cube.corner): l.label for l in tree.leaves}


def test_single_member_accepts_root():
    cover = BoxCover(3, ((0, (RationalBox.unit(3),)),))
    tree = adaptive_subdivide(cover)
    assert [(l.cube.level, l.status) for l in tree.leaves] == [(0, "accepted")]
    assert well_founded_check(tree) == (True, 0)
    stats = complex_colour_stats(tree, cover)
    assert stats.max_count == 1 and stats.histogram == {1: 1}


def test_three_fifths_example():
    cover = half_open_pair(F(3, 5), F(2, 5))
    tree = adaptive_subdivide(cover)
    assert leaf_map(tree) == {(1, (0,)): 0, (1, (1,)): 1}
    assert leaf_map(tree) == oracles.reference_subdivide(cover, 20)
    assert well_founded_check(tree) == (True, 1)
    stats = complex_colour_stats(tree, cover)
    assert stats.max_count == 2


def test_quarter_example():
    cover = half_open_pair(F(1, 2), F(1, 4))
    tree = adaptive_subdivide(cover)
    expected = oracles.reference_subdivide(cover, 20)
    assert leaf_map(tree) == expected
    assert (2, (0,)) in expected and expected[(2, (0,))] == 0
    assert sum(F(1, 2 ** lv) for lv, _ in expected) == 1


def test_third_boundary_depth():
    # overlap of width 1/48 around 1/3: cubes must shrink below it
    cover = half_open_pair(F(1, 3) + F(1, 48), F(1, 3))
    tree = adaptive_subdivide(cover)
    finite, depth = well_founded_check(tree)
    assert finite
    assert leaf_map(tree) == oracles.reference_subdivide(cover, 20)
    assert depth <= math.ceil(math.log2(48)) + 1


def test_refusal_is_reported():
    cover = half_open_pair(F(1, 3) + F(1, 1000), F(1, 3))
    tree = adaptive_subdivide(cover, max_level=4)
    finite, depth = well_founded_check(tree)
    assert not finite and depth == 4
    assert tree.refused and tree.leaf_volume(None) == 1
    with pytest.raises(ValueError):
        complex_colour_stats(tree, cover)


@pytest.mark.parametrize("seed", range(12))
def test_random_covers_match_reference(seed):
    dim = 1 + seed % 2
    cover = random_open_cover(dim, seed)
    tree = adaptive_subdivide(cover)
    assert leaf_map(tree) == oracles.reference_subdivide(cover, 20)


@pytest.mark.parametrize("seed", range(20))
def test_random_cover_invariants(seed):
    dim = 1 + seed % 3
    cover = random_open_cover(dim, seed)
    tree = adaptive_subdivide(cover)
    assert tree.complete
    assert tree.leaf_volume() == 1
    assert verify_leaves(tree, cover) == []
    # margins are at least 1/24, so dyadic cubes of side 1/32 always fit
    assert tree.depth() <= 5
    coarse = adaptive_subdivide(cover, max_level=max(0, tree.depth() - 1))
    assert refines(tree, coarse)


@pytest.mark.parametrize("seed", range(15))
def test_planar_colour_counts(seed):
    cover = random_open_cover(2, seed)
    tree = adaptive_subdivide(cover)
    stats = complex_colour_stats(tree, cover)
    assert stats.max_count >= 3
    assert sum(stats.histogram.values()) == len(tree.leaves)
    assert stats.face_violations == len(face_violations(tree))


def test_face_violation_detection():
    # one big cube next to two small ones along an edge: the big leaf's edge
    # is split by a hanging vertex
    def box(lo, hi, lo_open, hi_open):
        return (RationalBox(tuple(map(F, lo)), tuple(map(F, hi)), lo_open, hi_open),)

    cover = BoxCover(2, (
        (0, box((0, 0), ("1/2", 1), (False, False), (True, False))),
        (1, box(("1/2", 0), (1, "51/100"), (True, False), (False, True))),
        (2, box(("1/2", "1/2"), (1, 1), (False, True), (False, False))),
        (3, box(("2/5", 0), ("3/5", 1), (True, False), (True, False))),
    ))
    tree = adaptive_subdivide(cover)
    assert tree.complete
    bad = face_violations(tree)
    assert bad, [l.cube for l in tree.leaves]
    for a, b in bad:
        assert a.level != b.level


def test_jsonl_export_and_threads():
    cover = random_open_cover(2, 4)
    tree = adaptive_subdivide(cover)
    recs = leaves_from_jsonl(tree.to_jsonl())
    assert len(recs) == len(tree.leaves)
    assert set(recs[0]) == {"level", "corner", "status", "label"}
    assert json.loads(tree.to_jsonl().splitlines()[0]) == recs[0]
    assert adaptive_subdivide(cover, threads=4).to_jsonl() == tree.to_jsonl()


def test_dyadic_cube():
    c = DyadicCube(2, (1, 3))
    assert c.diameter() == F(1, 4) and c.volume() == F(1, 16)
    assert len(c.children()) == 4
    assert c.box().lo == (F(1, 4), F(3, 4))
    with pytest.raises(ValueError):
        DyadicCube(1, (2,))
