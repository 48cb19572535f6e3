"""Cubical and simplicial Sperner colourings.

A cubical colouring assigns a non-negative integer colour to every point of
[n]^N.  It satisfies the Sperner condition when two points at sup-distance n
(equivalently: some axis has one point at 0 and the other at n) never share a
colour.  Colours are plain integers; :func:`encode_bits` gives the canonical
integer for a 0/1 vector, bit ``i`` holding entry ``i``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .lattice import Index, grid


def encode_bits(bits: Sequence[int]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def decode_bits(code: int, dim: int) -> tuple[int, ...]:
    return tuple((code >> i) & 1 for i in range(dim))


class Colouring:
    """A total map [n]^N -> colour ids, stored as an int64 array."""

    __slots__ = ("dim", "n", "colours", "_sperner")

    def __init__(self, dim: int, n: int, colours):
        colours = np.array(colours, dtype=np.int64)
        shape = (n + 1,) * dim
        if colours.shape != shape:
            raise ValueError(f"colour array shape {colours.shape} != {shape}")
        if (colours < 0).any():
            raise ValueError("colour ids must be non-negative")
        colours.setflags(write=False)
        self.dim = dim
        self.n = n
        self.colours = colours
        self._sperner = None

    @classmethod
    def from_function(cls, dim: int, n: int, fn: Callable[[Index], int]) -> "Colouring":
        arr = np.empty((n + 1,) * dim, dtype=np.int64)
        for s in grid(dim, n):
            arr[s.coords] = fn(s)
        return cls(dim, n, arr)

    @classmethod
    def from_mapping(cls, dim: int, n: int, mapping) -> "Colouring":
        missing = [s for s in grid(dim, n) if s.coords not in mapping and s not in mapping]
        if missing:
            raise ValueError(f"colouring is not total: {missing[0].to_text()} has no colour")
        return cls.from_function(dim, n, lambda s: mapping[s.coords] if s.coords in mapping else mapping[s])

    def colour_of(self, sigma) -> int:
        return int(self.colours[tuple(sigma)])

    def __getitem__(self, sigma) -> int:
        return self.colour_of(sigma)

    @property
    def palette(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unique(self.colours))

    def items(self) -> Iterable[tuple[Index, int]]:
        for s in grid(self.dim, self.n):
            yield s, int(self.colours[s.coords])

    @property
    def sperner_valid(self) -> bool:
        if self._sperner is None:
            self._sperner = check_cubical_sperner(self) is None
        return self._sperner

    def __eq__(self, other):
        return (
            isinstance(other, Colouring)
            and (self.dim, self.n) == (other.dim, other.n)
            and np.array_equal(self.colours, other.colours)
        )

    def __repr__(self):
        return f"Colouring(dim={self.dim}, n={self.n}, palette={len(self.palette)})"


def extreme_masks(dim: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per grid point (flattened, lexicographic): bitmask of axes at 0 and at n."""
    idx = np.indices((n + 1,) * dim).reshape(dim, -1)
    weights = (1 << np.arange(dim, dtype=np.int64))[:, None]
    low = ((idx == 0) * weights).sum(axis=0)
    high = ((idx == n) * weights).sum(axis=0)
    return low, high


def check_cubical_sperner(phi: Colouring):
    """None when phi is a Sperner colouring, else the least violating pair.

    Pairs ``(s, t)`` are compared with ``s < t`` lexicographically and the
    lexicographically least pair is returned.
    """
    low, high = extreme_masks(phi.dim, phi.n)
    flat = phi.colours.reshape(-1)
    shape = phi.colours.shape
    for a in range(flat.size):
        rest = slice(a + 1, None)
        clash = ((low[a] & high[rest]) | (high[a] & low[rest])) != 0
        clash &= flat[rest] == flat[a]
        hit = np.flatnonzero(clash)
        if hit.size:
            b = a + 1 + int(hit[0])
            return (
                Index(phi.n, np.unravel_index(a, shape)),
                Index(phi.n, np.unravel_index(b, shape)),
            )
    return None


def is_sperner(phi: Colouring) -> bool:
    return check_cubical_sperner(phi) is None


def _cube_stack(colours: np.ndarray, n: int) -> np.ndarray:
    """Colours of all 2^N cube vertices, shape (2^N, n+1, ..., n+1)."""
    dim = colours.ndim
    base = np.arange(n + 1)
    shifted = np.minimum(base + 1, n)
    layers = []
    for tau in itertools.product((0, 1), repeat=dim):
        ix = np.ix_(*(shifted if t else base for t in tau))
        layers.append(colours[ix])
    return np.stack(layers)


def cube_colour_counts(phi: Colouring) -> np.ndarray:
    """Number of distinct colours on each positive cube, indexed by anchor."""
    stack = np.sort(_cube_stack(phi.colours, phi.n), axis=0)
    return 1 + (np.diff(stack, axis=0) != 0).sum(axis=0)


def max_colours_per_cube(phi: Colouring) -> tuple[Index, int]:
    """Anchor of a positive cube carrying the most colours, and that count.

    Anchors range over the whole grid, clamped cubes included; ties go to the
    lexicographically least anchor.
    """
    if not phi.sperner_valid:
        warnings.warn("colouring does not satisfy the Sperner condition", stacklevel=2)
    counts = cube_colour_counts(phi)
    flat = int(np.argmax(counts))
    sigma = Index(phi.n, np.unravel_index(flat, counts.shape))
    return sigma, int(counts.reshape(-1)[flat])


def cube_palette(phi: Colouring, sigma: Index) -> set[int]:
    from .lattice import positive_cube

    return {phi.colour_of(v) for v in positive_cube(sigma)}


def find_rich_cube(phi: Colouring, target: int) -> Index | None:
    """First anchor (lexicographic sweep) whose cube shows >= target colours."""
    if target < 1:
        raise ValueError("target must be >= 1")
    if target > 1 << phi.dim:
        return None
    from .lattice import positive_cube

    for sigma in grid(phi.dim, phi.n):
        seen = set()
        for v in positive_cube(sigma):
            seen.add(phi.colours[v.coords])
            if len(seen) >= target:
                return sigma
    return None


def canonical_colouring(dim: int, n: int) -> Colouring:
    """Colour bit i is 1 exactly on the face where coordinate i equals n."""
    idx = np.indices((n + 1,) * dim)
    weights = (1 << np.arange(dim, dtype=np.int64)).reshape((dim,) + (1,) * dim)
    return Colouring(dim, n, ((idx == n) * weights).sum(axis=0))


PALETTE_MODES = ("canonical", "binary", "wide", "few")


def random_sperner_colouring(dim: int, n: int, seed: int, palette_mode: str = "binary",
                             sweeps: int = 2) -> Colouring:
    """Seeded random Sperner colouring.

    Starts from :func:`canonical_colouring` and proposes ``sweeps * (n+1)^N``
    single-point recolourings, each accepted only when the point keeps a
    colour distinct from every point it must differ from.  Palette modes:

    ``canonical``  no perturbation
    ``binary``     proposals drawn from the 2^N bit-vector codes
    ``wide``       proposals drawn from ``range(2^N + (n+1)^N)``
    ``few``        proposals drawn from ``range(dim + 1)`` (stresses the bound)
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be >= 1")
    if palette_mode not in PALETTE_MODES:
        raise ValueError(f"unknown palette mode {palette_mode!r}")
    base = canonical_colouring(dim, n)
    if palette_mode == "canonical":
        return base
    rng = np.random.default_rng(seed)
    flat = base.colours.reshape(-1).copy()
    size = flat.size
    span = {"binary": 1 << dim, "wide": (1 << dim) + size, "few": dim + 1}[palette_mode]
    low, high = extreme_masks(dim, n)
    points = rng.integers(0, size, sweeps * size)
    proposals = rng.integers(0, span, sweeps * size)
    for p, c in zip(points.tolist(), proposals.tolist()):
        if flat[p] == c:
            continue
        if low[p] or high[p]:
            clash = ((low[p] & high) | (high[p] & low)) != 0
            if np.any(flat[clash] == c):
                continue
        flat[p] = c
    phi = Colouring(dim, n, flat.reshape((n + 1,) * dim))
    assert phi.sperner_valid
    return phi


# ---------------------------------------------------------------------------
# simplicial colourings


class SimplicialComplexK:
    """Edgewise (staircase) subdivision of the standard d-simplex at scale m.

    Vertices are barycentric integer tuples ``(k_0, ..., k_d)`` with sum m,
    standing for the point ``k / m``.  Cells are the Freudenthal simplices of
    the cube grid lying inside the ordered region ``m >= x_1 >= ... >= x_d >= 0``
    where ``x_j = k_j + ... + k_d``; there are ``m**d`` of them.
    """

    def __init__(self, d: int, m: int):
        if d < 1 or m < 1:
            raise ValueError("d and m must be >= 1")
        self.d = d
        self.m = m
        self.vertices = sorted(
            (k for k in itertools.product(range(m + 1), repeat=d + 1) if sum(k) == m),
            reverse=True,
        )
        self.cells = self._build_cells()

    def _to_bary(self, x) -> tuple[int, ...]:
        m, d = self.m, self.d
        xs = (m,) + tuple(x) + (0,)
        return tuple(xs[j] - xs[j + 1] for j in range(d + 1))

    def _build_cells(self):
        m, d = self.m, self.d
        cells = []
        for base in itertools.product(range(m), repeat=d):
            for perm in itertools.permutations(range(d)):
                x = list(base)
                path = [tuple(x)]
                for axis in perm:
                    x[axis] += 1
                    path.append(tuple(x))
                if all(all(p[j] >= p[j + 1] for j in range(d - 1)) and p[0] <= m for p in path):
                    cells.append(tuple(self._to_bary(p) for p in path))
        return cells

    def corner(self, j: int) -> tuple[int, ...]:
        return tuple(self.m if i == j else 0 for i in range(self.d + 1))

    @staticmethod
    def carrier(v) -> tuple[int, ...]:
        """Indices of the smallest face of the simplex containing v."""
        return tuple(i for i, k in enumerate(v) if k > 0)

    def d_distance(self, v, w) -> float:
        return max(abs(a - b) for a, b in zip(v, w)) / self.m


@dataclass
class SimplicialColouring:
    complex: SimplicialComplexK
    labels: dict

    def label_of(self, v) -> int:
        return self.labels[tuple(v)]


def check_simplicial_sperner(phi: SimplicialColouring) -> bool:
    """Corners carry all of 0..d bijectively and each vertex reuses a label of
    the corners spanning its carrier face."""
    K = phi.complex
    if set(phi.labels) != set(K.vertices):
        return False
    corner_labels = [phi.label_of(K.corner(j)) for j in range(K.d + 1)]
    if sorted(corner_labels) != list(range(K.d + 1)):
        return False
    for v in K.vertices:
        allowed = {corner_labels[j] for j in K.carrier(v)}
        if phi.label_of(v) not in allowed:
            return False
    return True


def random_simplicial_labeling(d: int, m: int, seed: int, permute: bool = True) -> SimplicialColouring:
    rng = np.random.default_rng(seed)
    K = SimplicialComplexK(d, m)
    perm = rng.permutation(d + 1) if permute else np.arange(d + 1)
    labels = {}
    for v in K.vertices:
        face = K.carrier(v)
        labels[v] = int(perm[face[int(rng.integers(len(face)))]])
    return SimplicialColouring(K, labels)


def boundedness_check(phi: SimplicialColouring) -> bool:
    """Every colour class has barycentric d-diameter < 1."""
    K = phi.complex
    classes: dict[int, list] = {}
    for v in K.vertices:
        classes.setdefault(phi.label_of(v), []).append(v)
    for members in classes.values():
        arr = np.array(members)
        for axis in range(K.d + 1):
            if arr[:, axis].max() - arr[:, axis].min() >= K.m:
                return False
    return True


def fully_labeled_cells(phi: SimplicialColouring) -> list:
    full = set(range(phi.complex.d + 1))
    return [c for c in phi.complex.cells if {phi.label_of(v) for v in c} == full]


def find_fully_labeled_cell(phi: SimplicialColouring):
    """First cell whose vertices carry every label, or None.

    Invalid colourings get None without a scan.
    """
    if not check_simplicial_sperner(phi):
        return None
    full = set(range(phi.complex.d + 1))
    for cell in phi.complex.cells:
        if {phi.label_of(v) for v in cell} == full:
            return cell
    return None
