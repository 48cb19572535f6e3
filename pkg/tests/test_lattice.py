import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spernerkit.lattice import (
    AKFunction,
    CoordSet,
    GridSet,
    Index,
    ball,
    grid,
    hat_ball,
    local_lebesgue,
    positive_cube,
    property_M,
    property_M_report,
    sup_distance,
    superset_family,
    truncated_add,
)

import oracles


def idx(n, *c):
    return Index(n, c)


@st.composite
def index_pairs(draw, max_dim=4, max_n=4):
    n = draw(st.integers(1, max_n))
    dim = draw(st.integers(1, max_dim))
    coords = st.tuples(*[st.integers(0, n)] * dim)
    return n, draw(coords), draw(coords), draw(coords)


def test_truncated_add_examples():
    assert truncated_add(idx(3, 2), idx(3, 2)) == idx(3, 3)
    s = idx(2, 1, 2, 0)
    assert truncated_add(s, Index.zero(3, 2)) == s
    assert truncated_add(s, idx(2, 1, 1, 1)).coords == oracles.add((1, 2, 0), (1, 1, 1), 2) == (2, 2, 1)


def test_truncated_add_mismatch():
    with pytest.raises(ValueError):
        truncated_add(idx(2, 1), idx(3, 1))
    with pytest.raises(ValueError):
        truncated_add(idx(2, 1), idx(2, 1, 1))


@given(index_pairs())
def test_truncated_add_algebra(case):
    n, a, b, c = case
    A, B, C = Index(n, a), Index(n, b), Index(n, c)
    assert truncated_add(A, B) == truncated_add(B, A)
    assert truncated_add(truncated_add(A, B), C) == truncated_add(A, truncated_add(B, C))


def test_positive_cube_examples():
    assert [s.coords for s in positive_cube(idx(2, 0, 0))] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [s.coords for s in positive_cube(idx(2, 2, 2))] == [(2, 2)]
    got = [s.coords for s in positive_cube(idx(2, 1, 2))]
    assert got == sorted(oracles.cube((1, 2), 2)) == [(1, 2), (2, 2)]


@settings(max_examples=60)
@given(st.integers(1, 4), st.data())
def test_positive_cube_cardinality(n, data):
    dim = data.draw(st.integers(1, 12 if n > 1 else 8))
    coords = data.draw(st.tuples(*[st.integers(0, n)] * dim))
    cube = positive_cube(Index(n, coords))
    assert len(cube) == 2 ** sum(1 for c in coords if c < n)
    assert cube == sorted(cube)


def test_sup_distance_examples():
    s = idx(4, 1, 2, 4)
    assert sup_distance(s, s) == 0
    assert sup_distance(idx(3, 0, 3), idx(3, 3, 3)) == 3
    assert sup_distance(s, idx(4, 3, 2, 0)) == oracles.dist((1, 2, 4), (3, 2, 0)) == 4


@given(index_pairs())
def test_sup_distance_metric(case):
    n, a, b, c = case
    A, B, C = Index(n, a), Index(n, b), Index(n, c)
    assert sup_distance(A, B) >= 0
    assert (sup_distance(A, B) == 0) == (A == B)
    assert sup_distance(A, B) == sup_distance(B, A)
    assert sup_distance(A, C) <= sup_distance(A, B) + sup_distance(B, C)


def test_ball_examples():
    s = idx(2, 1, 0)
    assert ball(s, (), 2) == [s]
    assert [t.coords for t in ball(s, {0}, 1)] == [(0, 0), (1, 0), (2, 0)]
    full = ball(idx(2, 0, 0), {0, 1}, 2)
    assert len(full) == 9 and {t.coords for t in full} == set(oracles.points(2, 2))
    with pytest.raises(ValueError):
        ball(s, {0}, 3)


def test_hat_ball_examples():
    s = idx(2, 1, 1)
    assert hat_ball(s, {0, 1}, 2) == [s]
    assert {t.coords for t in hat_ball(s, (), 2)} == set(oracles.points(2, 2))
    assert [t.coords for t in hat_ball(s, {0}, 1)] == [(1, 0), (1, 1), (1, 2)]
    with pytest.raises(ValueError):
        hat_ball(s, {0}, -1)


@settings(max_examples=60)
@given(index_pairs(max_dim=3, max_n=3), st.data())
def test_balls_match_oracle(case, data):
    n, a, _, _ = case
    dim = len(a)
    A = data.draw(st.sets(st.integers(0, dim - 1)))
    k = data.draw(st.integers(0, n))
    s = Index(n, a)
    assert {t.coords for t in ball(s, A, k)} == oracles.ball(a, A, k, n)
    assert {t.coords for t in hat_ball(s, A, k)} == oracles.hat_ball(a, A, k, n)
    if k < n:
        assert set(ball(s, A, k)) <= set(ball(s, A, k + 1))
    assert set(ball(s, A, k)) <= set(hat_ball(s, set(range(dim)) - set(A), k))


def _gs(dim, n, pts):
    return GridSet.from_points(dim, n, pts)


def test_local_lebesgue_examples():
    s = idx(3, 1, 2)
    assert local_lebesgue(s, (), [GridSet.full(2, 3)]) == 3
    assert local_lebesgue(s, (), [_gs(2, 3, [s.coords])]) == 0
    assert local_lebesgue(s, (), [_gs(2, 3, [(0, 0)])]) is None
    with pytest.raises(ValueError):
        local_lebesgue(s, (), [])


def test_local_lebesgue_two_halves():
    # B-hat((1), {}, 1) = {0,1,2} fits neither {0,1} nor {1,2}, so the value is 0
    s = idx(2, 1)
    cover = [_gs(1, 2, [(0,), (1,)]), _gs(1, 2, [(1,), (2,)])]
    expected = oracles.lebesgue((1,), set(), [{(0,), (1,)}, {(1,), (2,)}], 2)
    assert expected == 0
    assert local_lebesgue(s, (), cover) == expected


def _random_cover(rng, dim, n, members):
    pts = oracles.points(dim, n)
    sets = [set() for _ in range(members)]
    for p in pts:
        for j in rng.choice(members, size=rng.integers(1, members + 1), replace=False):
            sets[int(j)].add(p)
    return sets


@pytest.mark.parametrize("seed", range(15))
def test_local_lebesgue_matches_oracle_and_is_monotone(seed):
    rng = np.random.default_rng(seed)
    dim, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    sets = _random_cover(rng, dim, n, 3)
    cover = [_gs(dim, n, s) for s in sets]
    for p in oracles.points(dim, n):
        vals = {}
        for r in range(dim + 1):
            for A in itertools.combinations(range(dim), r):
                got = local_lebesgue(Index(n, p), A, cover)
                assert got == oracles.lebesgue(p, set(A), sets, n)
                vals[frozenset(A)] = got
        for A1, v1 in vals.items():
            for A2, v2 in vals.items():
                if A1 <= A2:
                    assert v1 <= v2


def test_property_m_examples():
    full = GridSet.full(2, 2)
    rep = property_M_report(idx(2, 0, 1), (), 2, full, [full])
    assert rep.holds and rep.vacuous
    empty = GridSet.empty(2, 2)
    assert not property_M(idx(2, 0, 1), (), 0, empty, [empty, full])


@pytest.mark.parametrize("k", [0, 1, 2])
def test_property_m_half_grids(k):
    lo = {p for p in oracles.points(2, 2) if p[0] <= 1}
    hi = {p for p in oracles.points(2, 2) if p[0] >= 1}
    cover = [_gs(2, 2, lo), _gs(2, 2, hi)]
    for G, Gs in zip(cover, (lo, hi)):
        assert property_M(idx(2, 0, 0), (), k, G, cover) == \
            oracles.property_m((0, 0), set(), k, Gs, [lo, hi], 2)


@pytest.mark.parametrize("seed", range(12))
def test_property_m_random_against_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    dim, n = int(rng.integers(2, 4)), int(rng.integers(1, 4))
    sets = _random_cover(rng, dim, n, 3)
    cover = [_gs(dim, n, s) for s in sets]
    for p in oracles.points(dim, n)[:: max(1, (n + 1) ** dim // 6)]:
        for A in ((), (0,)):
            for k in range(n + 1):
                for G, Gs in zip(cover, sets):
                    got = property_M(Index(n, p), A, k, G, cover)
                    assert got == oracles.property_m(p, set(A), k, Gs, sets, n)


def test_superset_family_policies():
    A = CoordSet(4, frozenset({1}))
    strict, _ = superset_family(A)
    assert all(A.members < B.members and not B.is_full() for B in strict)
    assert len(strict) == 2 ** 3 - 2
    fin, _ = superset_family(A, strict=False, policy="finite")
    assert len(fin) == 2 ** 3 and fin[0] == A and fin[-1].is_full()
    big, sampled = superset_family(CoordSet.empty(20), cap=50, seed=3)
    assert sampled and len(big) == 50
    assert superset_family(CoordSet.empty(20), cap=50, seed=3)[0] == big


def test_index_text_round_trip():
    s = idx(2, 1, 0, 2)
    assert s.to_text() == "n=2 N=3 : 1,0,2"
    assert Index.from_text(s.to_text()) == s
    with pytest.raises(ValueError):
        Index.from_text("n=2 N=2 : 1,0,2")
    with pytest.raises(ValueError):
        idx(2, 3)


def test_ak_function():
    chi = AKFunction.between(idx(3, 1, 1, 0), idx(3, 2, 0, 0), {0, 1})
    assert chi.apply(idx(3, 1, 1, 0)) == idx(3, 2, 0, 0)
    with pytest.raises(ValueError):
        AKFunction(2, 1, (1, 1), CoordSet(2, frozenset({0})))


def test_gridset_copies_input():
    mask = np.zeros((3, 3), dtype=bool)
    g = GridSet(2, 2, mask)
    mask[0, 0] = True
    assert idx(2, 0, 0) not in g
    assert mask.flags.writeable
    assert g.diameter() == -1
    assert GridSet.full(2, 2).diameter() == 2
    assert [p.coords for p in grid(1, 2)] == [(0,), (1,), (2,)]
