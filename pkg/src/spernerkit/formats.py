"""Plain-text readers and writers for colourings and box covers.

Cubical colouring::

    cubical n=2 N=2
    0,0 -> 0
    0,1 -> 0
    ...

Cover::

    cover N=2
    member 0
    axis_0 lo 0 closed hi 2/3 open
    axis_1 lo 0 closed hi 1 closed

A member may list several boxes; each box is N consecutive axis lines.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .covers.boxes import BoxCover, RationalBox
from .labelings import Colouring, SimplicialColouring, SimplicialComplexK
from .lattice import Index


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _header(lines, kind: str, keys: tuple[str, ...]) -> dict:
    try:
        no, line = next(lines)
    except StopIteration:
        raise ParseError(f"empty file, expected '{kind}' header") from None
    parts = line.split()
    if not parts or parts[0] != kind:
        raise ParseError(f"expected '{kind}' header, got {line!r}", no)
    vals = {}
    for p in parts[1:]:
        k, _, v = p.partition("=")
        if k not in keys or not v.isdigit():
            raise ParseError(f"bad header field {p!r}", no)
        vals[k] = int(v)
    missing = [k for k in keys if k not in vals]
    if missing:
        raise ParseError(f"header lacks {', '.join(missing)}", no)
    return vals


_ENTRY = re.compile(r"^([0-9,\s]+)->\s*(\d+)$")


def _entries(lines, width: int, hi: int):
    for no, line in lines:
        m = _ENTRY.match(line)
        if not m:
            raise ParseError(f"expected '<coords> -> <colour>', got {line!r}", no)
        try:
            coords = tuple(int(c) for c in m.group(1).split(","))
        except ValueError:
            raise ParseError(f"bad coordinates {m.group(1).strip()!r}", no) from None
        if len(coords) != width:
            raise ParseError(f"expected {width} coordinates, got {len(coords)}", no)
        if any(not 0 <= c <= hi for c in coords):
            raise ParseError(f"coordinate outside [0, {hi}] in {coords}", no)
        yield no, coords, int(m.group(2))


# colourings ----------------------------------------------------------------

def write_colouring(phi: Colouring) -> str:
    out = [f"cubical n={phi.n} N={phi.dim}"]
    for sigma, c in phi.items():
        out.append(f"{','.join(map(str, sigma.coords))} -> {c}")
    return "\n".join(out) + "\n"


def parse_colouring(path):
    return parse_colouring_text(Path(path).read_text())


def parse_colouring_text(text: str) -> Colouring:
    lines = _lines(text)
    h = _header(lines, "cubical", ("n", "N"))
    n, dim = h["n"], h["N"]
    if n < 1 or dim < 1:
        raise ParseError("n and N must be positive", 1)
    arr = np.full((n + 1,) * dim, -1, dtype=np.int64)
    for no, coords, c in _entries(lines, dim, n):
        if arr[coords] >= 0:
            raise ParseError(f"grid point {Index(n, coords).to_text()} listed twice", no)
        arr[coords] = c
    missing = np.argwhere(arr < 0)
    if missing.size:
        absent = Index(n, tuple(int(v) for v in missing[0]))
        raise ParseError(f"colouring is not total: no line for {absent.to_text()}"
                         + (f" ({len(missing)} missing)" if len(missing) > 1 else ""))
    return Colouring(dim, n, arr)


def write_simplicial(phi: SimplicialColouring) -> str:
    cx = phi.complex
    out = [f"simplicial d={cx.d} m={cx.m}"]
    for v in sorted(cx.vertices):
        out.append(f"{','.join(map(str, v))} -> {phi.label_of(v)}")
    return "\n".join(out) + "\n"


def parse_simplicial(path):
    return parse_simplicial_text(Path(path).read_text())


def parse_simplicial_text(text: str) -> SimplicialColouring:
    lines = _lines(text)
    h = _header(lines, "simplicial", ("d", "m"))
    cx = SimplicialComplexK(h["d"], h["m"])
    labels = {}
    for no, coords, c in _entries(lines, cx.d + 1, cx.m):
        if sum(coords) != cx.m:
            raise ParseError(f"barycentric coordinates {coords} do not sum to {cx.m}", no)
        if coords in labels:
            raise ParseError(f"vertex {coords} listed twice", no)
        labels[coords] = c
    for v in sorted(cx.vertices):
        if v not in labels:
            raise ParseError(f"labeling is not total: no line for vertex {v}")
    return SimplicialColouring(cx, labels)


# covers --------------------------------------------------------------------

_AXIS = re.compile(
    r"^axis_(\d+)\s+lo\s+(\S+)\s+(open|closed)\s+hi\s+(\S+)\s+(open|closed)$")


def _rational(text: str, no: int) -> Fraction:
    if not re.fullmatch(r"-?\d+(/\d+)?", text):
        raise ParseError(f"bad rational {text!r}", no)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}", no) from None


def _label(text: str):
    return int(text) if re.fullmatch(r"\d+", text) else text


def _fmt_label(label) -> str:
    s = str(label)
    if not s or any(ch.isspace() for ch in s) or "#" in s:
        raise ValueError(f"label {label!r} cannot be written")
    return s


def write_cover(cover: BoxCover) -> str:
    out = [f"cover N={cover.dim}"]
    for label, region in cover.members:
        out.append(f"member {_fmt_label(label)}")
        for b in region:
            for i in range(cover.dim):
                out.append(
                    f"axis_{i} lo {b.lo[i]} {'open' if b.lo_open[i] else 'closed'} "
                    f"hi {b.hi[i]} {'open' if b.hi_open[i] else 'closed'}")
    return "\n".join(out) + "\n"


def parse_cover(path):
    return parse_cover_text(Path(path).read_text())


def parse_cover_text(text: str) -> BoxCover:
    lines = _lines(text)
    dim = _header(lines, "cover", ("N",))["N"]
    if dim < 1:
        raise ParseError("N must be positive", 1)
    members: list = []
    seen: dict = {}
    current = None
    pending: list = []

    def close_member(no):
        if current is None:
            return
        if pending:
            raise ParseError(f"member {current[0]}: incomplete box ({len(pending)} of {dim} axes)", no)
        if not current[1]:
            raise ParseError(f"member {current[0]} has no boxes", no)
        members.append((current[0], tuple(current[1])))

    last = 0
    for no, line in lines:
        last = no
        if line.startswith("member"):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'member <label>', got {line!r}", no)
            close_member(no)
            label = _label(parts[1])
            if label in seen:
                raise ParseError(f"duplicate member label {parts[1]!r} (first at line {seen[label]})", no)
            seen[label] = no
            current = (label, [])
            pending = []
            continue
        m = _AXIS.match(line)
        if not m:
            raise ParseError(f"expected an axis line, got {line!r}", no)
        if current is None:
            raise ParseError("axis line before any 'member'", no)
        axis = int(m.group(1))
        if axis != len(pending):
            raise ParseError(f"expected axis_{len(pending)}, got axis_{axis}", no)
        lo, hi = _rational(m.group(2), no), _rational(m.group(4), no)
        if not (0 <= lo <= hi <= 1):
            raise ParseError(f"axis_{axis}: need 0 <= lo <= hi <= 1, got {lo}, {hi}", no)
        pending.append((lo, hi, m.group(3) == "open", m.group(5) == "open"))
        if len(pending) == dim:
            box = RationalBox(*(tuple(p[k] for p in pending) for k in range(4)))
            if not box.is_empty():
                current[1].append(box)
            pending = []
    close_member(last)
    if not members:
        raise ParseError("cover has no members")
    return BoxCover(dim, tuple(members))

