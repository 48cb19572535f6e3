"""Finite-support indices, extension chains, and nerve posets of box covers."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .covers.boxes import BoxCover, label_key, region_intersection


@dataclass(frozen=True)
class SparseIndex:
    """An index of [n]^{<w} that is zero outside a finite support, addressed
    through a window of the first ``window`` coordinates."""

    n: int
    support: tuple  # sorted (coord, value) pairs, values in [1, n]
    window: int

    def __post_init__(self):
        items = tuple(sorted(dict(self.support).items()))
        object.__setattr__(self, "support", items)
        for i, v in items:
            if not 0 <= i < self.window:
                raise ValueError(f"support coordinate {i} outside window {self.window}")
            if not 1 <= v <= self.n:
                raise ValueError(f"support value {v} at {i} outside [1, {self.n}]")

    @classmethod
    def from_coords(cls, n: int, coords: Sequence[int]) -> "SparseIndex":
        return cls(n, tuple((i, int(v)) for i, v in enumerate(coords) if v), len(coords))

    @property
    def keys(self) -> frozenset:
        return frozenset(i for i, _ in self.support)

    def coords(self, window: int | None = None) -> tuple[int, ...]:
        w = self.window if window is None else window
        out = [0] * w
        for i, v in self.support:
            out[i] = v
        return tuple(out)

    def value(self, i: int) -> int:
        return dict(self.support).get(i, 0)

    def extends(self, other: "SparseIndex") -> bool:
        """True iff self agrees with ``other`` on the support of ``other``."""
        return all(self.value(i) == v for i, v in other.support)

    def to_text(self) -> str:
        body = ",".join(f"{i}:{v}" for i, v in self.support)
        return f"n={self.n} W={self.window} : {{{body}}}"


# colour oracles ---------------------------------------------------------

class ColourOracle:
    """Colouring of finite-support indices.  ``colours`` takes an integer array
    of shape (k, W) whose rows are coordinate vectors and returns k colour ids."""

    name = "oracle"

    def __init__(self, n: int):
        self.n = n

    def colours(self, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def colour(self, coords: Sequence[int]) -> int:
        return int(self.colours(np.asarray([coords], dtype=np.int64))[0])


class CanonicalOracle(ColourOracle):
    """Bit i of the colour is set iff coordinate i equals n."""

    name = "canonical"

    def colours(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        weights = np.left_shift(np.int64(1), np.arange(rows.shape[1], dtype=np.int64))
        return ((rows == self.n) * weights).sum(axis=1)


class HashedOracle(ColourOracle):
    """Refines the canonical colouring by a seeded hash of the whole index.

    Two indices with different canonical codes keep different colours, so the
    Sperner condition survives; ``spread`` controls how many colours share a
    canonical code.
    """

    name = "hashed"
    _MIX = np.uint64(0x9E3779B97F4A7C15)

    def __init__(self, n: int, seed: int = 0, spread: int = 3):
        super().__init__(n)
        self.seed = seed
        self.spread = spread
        self._canon = CanonicalOracle(n)

    def colours(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        h = np.full(rows.shape[0], np.uint64(self.seed * 2654435761 + 1), dtype=np.uint64)
        with np.errstate(over="ignore"):
            for j in range(rows.shape[1]):
                h ^= rows[:, j].astype(np.uint64) + np.uint64(j + 1) * self._MIX
                h *= np.uint64(0xBF58476D1CE4E5B9)
                h ^= h >> np.uint64(31)
        return self._canon.colours(rows) * self.spread + (h % np.uint64(self.spread)).astype(np.int64)


ORACLES: dict[str, Callable[..., ColourOracle]] = {
    "canonical": lambda n, seed=0: CanonicalOracle(n),
    "hashed": lambda n, seed=0: HashedOracle(n, seed),
}


def _cube_rows(coords: Sequence[int], n: int) -> np.ndarray:
    base = np.asarray(coords, dtype=np.int64)
    taus = np.array(list(itertools.product((0, 1), repeat=len(base))), dtype=np.int64)
    return np.minimum(base + taus, n)


def cube_palette(oracle: ColourOracle, sigma: SparseIndex, window: int) -> set[int]:
    """Colours on the positive cube of ``sigma`` restricted to the window."""
    return set(int(c) for c in np.unique(oracle.colours(_cube_rows(sigma.coords(window), oracle.n))))


# extension chains -------------------------------------------------------

@dataclass
class ChainResult:
    chain: list  # [(SparseIndex, colour)]
    windows: list
    target: int
    evaluations: int
    exhausted: bool

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def complete(self) -> bool:
        return len(self.chain) >= self.target

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "length": self.length,
            "budget_exhausted": self.exhausted,
            "evaluations": self.evaluations,
            "chain": [{"sigma": s.to_text(), "colour": t, "window": w}
                      for (s, t), w in zip(self.chain, self.windows)],
        }


def window_schedule(depth: int, w0: int = 4, step: int = 2) -> list[int]:
    return [w0 + k * step for k in range(depth)]


def _extensions(prev: SparseIndex | None, n: int, window: int):
    # free coordinates vary in product order, so candidates come out lexicographic
    fixed = dict(prev.support) if prev is not None else {}
    free = [i for i in range(window) if i not in fixed]
    for values in itertools.product(range(n + 1), repeat=len(free)):
        sup = dict(fixed)
        sup.update((i, v) for i, v in zip(free, values) if v)
        yield SparseIndex(n, tuple(sup.items()), window)


def extension_chain_search(oracle: ColourOracle, depth: int, w0: int = 4, step: int = 2,
                           budget: int = 200_000) -> ChainResult:
    """Depth-first search for a chain ``(sigma_k, tau_k)`` of length ``depth``.

    ``sigma_{k+1}`` must extend ``sigma_k``; the cube of ``sigma_k`` (inside
    window ``W_k``) must carry every colour chosen so far, and the colours are
    pairwise distinct.  Candidates are tried in lexicographic order of their
    coordinate vectors, colours in increasing order.  ``budget`` caps the number
    of cube palettes computed; the longest chain seen is returned either way.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    windows = window_schedule(depth, w0, step)
    n = oracle.n
    best: list = []
    evals = 0
    exhausted = False

    def dfs(chain: list) -> bool:
        nonlocal best, evals, exhausted
        if len(chain) > len(best):
            best = list(chain)
        k = len(chain)
        if k == depth:
            return True
        prev = chain[-1][0] if chain else None
        used = {t for _, t in chain}
        for sigma in _extensions(prev, n, windows[k]):
            if evals >= budget:
                exhausted = True
                return False
            evals += 1
            pal = cube_palette(oracle, sigma, windows[k])
            if not used <= pal:
                continue
            for tau in sorted(pal - used):
                chain.append((sigma, tau))
                if dfs(chain):
                    return True
                chain.pop()
                if exhausted:
                    return False
        return False

    dfs([])
    return ChainResult(best, windows[:len(best)], depth, evals, exhausted)


def check_extension_chain(chain: Sequence, oracle: ColourOracle, windows: Sequence[int]) -> list[str]:
    """Independent re-check of a chain; returns the list of failed clauses."""
    problems = []
    n = oracle.n
    colours = [t for _, t in chain]
    if len(set(colours)) != len(colours):
        problems.append("colours not pairwise distinct")
    for k, ((sigma, _), w) in enumerate(zip(chain, windows)):
        coords = sigma.coords(w)
        pal = set()
        for bits in itertools.product((0, 1), repeat=w):
            pal.add(oracle.colour([min(n, a + b) for a, b in zip(coords, bits)]))
        missing = set(colours[:k + 1]) - pal
        if missing:
            problems.append(f"step {k + 1}: colours {sorted(missing)} not on the cube")
        if k + 1 < len(chain):
            nxt = chain[k + 1][0]
            for i, v in sigma.support:
                if nxt.value(i) != v:
                    problems.append(f"step {k + 2}: coordinate {i} changed from {v}")
    return problems


# nerve posets -------------------------------------------------------------

@dataclass
class NervePoset:
    labels: list
    elements: dict = field(default_factory=dict)  # frozenset -> intersection region
    max_size: int = 0
    tests: int = 0
    partial: bool = False

    def ordered(self) -> list[frozenset]:
        return sorted(self.elements, key=lambda e: (len(e), [label_key(l) for l in _sorted(e)]))

    def facets(self, element: frozenset) -> list[frozenset]:
        if len(element) == 1:
            return []
        return [element - {l} for l in _sorted(element)]

    def is_downward_closed(self) -> bool:
        return all(f in self.elements for e in self.elements for f in self.facets(e))

    def to_adjacency(self) -> list[dict]:
        return [{"element": _sorted(e), "facets": [_sorted(f) for f in self.facets(e)]}
                for e in self.ordered()]

    def to_json(self) -> str:
        return json.dumps({"max_size": self.max_size, "partial": self.partial,
                           "tests": self.tests, "elements": self.to_adjacency()})


def _sorted(e) -> list:
    return sorted(e, key=label_key)


def build_nerve_poset(cover: BoxCover, max_size: int, budget: int = 1_000_000,
                      threads: int = 1) -> NervePoset:
    """All intersecting subfamilies of at most ``max_size`` members.

    Level k+1 is grown from level k by adding a larger label; a candidate is
    tested only when all its facets are present.  Intersections are exact box
    arithmetic.  ``budget`` caps the number of intersection tests.
    """
    labels = _sorted(cover.labels)
    rank = {l: i for i, l in enumerate(labels)}
    poset = NervePoset(labels, max_size=max_size)
    level = {}
    for l in labels:
        level[frozenset([l])] = tuple(cover.region(l))
    poset.elements.update(level)
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for size in range(2, max_size + 1):
            cands = []
            for e in sorted(level, key=lambda e: sorted(rank[x] for x in e)):
                top = max(rank[x] for x in e)
                for l in labels[top + 1:]:
                    new = e | {l}
                    if all(new - {x} in level for x in e):
                        cands.append((new, level[e], cover.region(l)))
            if poset.tests + len(cands) > budget:
                cands = cands[:max(0, budget - poset.tests)]
                poset.partial = True
            poset.tests += len(cands)
            work = lambda c: region_intersection(c[1], c[2])
            results = list(pool.map(work, cands)) if pool else [work(c) for c in cands]
            level = {c[0]: r for c, r in zip(cands, results) if r}
            poset.elements.update(level)
            if poset.partial or not level:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return poset


def max_chain_length(poset: NervePoset) -> int:
    """Longest inclusion chain; for a downward-closed family this is the
    largest element size, which is asserted against a direct DP."""
    if not poset.elements:
        return 0
    by_size = max(len(e) for e in poset.elements)
    if poset.is_downward_closed():
        return by_size
    return chain_length_dp(poset)


def chain_length_dp(poset: NervePoset) -> int:
    """Longest chain by dynamic programming over all strict inclusions."""
    elems = poset.ordered()
    best = {}
    for e in elems:
        best[e] = 1 + max((best[f] for f in best if f < e), default=0)
    return max(best.values(), default=0)


def nested_cover_chain(cover: BoxCover, target: int, budget: int = 1_000_000):
    """Least (in label order) intersecting family of ``target`` members, or None."""
    if target < 1 or target > len(cover):
        return None
    poset = build_nerve_poset(cover, target, budget)
    hits = [e for e in poset.ordered() if len(e) == target]
    return _sorted(hits[0]) if hits else None
