"""Exact 2D rectilinear regions with rational coordinates.

Every region here is a regular closed set bounded by axis-aligned edges.
The canonical representation is a slab decomposition: a sorted tuple of
vertical slabs (x0, x1, intervals), where intervals is a sorted tuple of
disjoint, non-touching closed y-intervals giving the cross-section anywhere
strictly inside the slab.  Adjacent slabs with identical cross-sections are
merged, so the decomposition (and therefore region equality) is canonical.

Polygon rings are derived from the slabs on demand: boundary edges are
collected with the interior kept on the left, chained into cycles, split at
pinch vertices so every ring is simple, and sorted.  Ring lists use the
even-odd fill convention; orientation carries no meaning and is normalized
to counterclockwise.

Booleans, containment and erosion/dilation all work directly on slabs and
never leave rational arithmetic.  The raster containment check at the bottom
of the module is a deliberately separate code path (ray parity against the
rings, sampled on a grid) used as an independent oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Literal, Sequence

import numpy as np

Coord = Fraction
Point = tuple[Fraction, Fraction]
Interval = tuple[Fraction, Fraction]
Slab = tuple[Fraction, Fraction, tuple[Interval, ...]]


class GeometryError(ValueError):
    pass


class NonRectilinearRegion(GeometryError):
    """Raised when input rings or a transform leave the axis-aligned class."""


class SingularTransform(GeometryError):
    pass


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"expected a rational coordinate, got {value!r}")


# ---------------------------------------------------------------------------
# closed-interval set helpers (inputs/outputs: sorted disjoint non-touching)

def _merge_intervals(raw: Iterable[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for lo, hi in sorted(raw):
        if lo >= hi:
            continue
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


def _interval_union(a: Sequence[Interval], b: Sequence[Interval]) -> tuple[Interval, ...]:
    return _merge_intervals(list(a) + list(b))


def _interval_intersection(a: Sequence[Interval], b: Sequence[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def _interval_difference(a: Sequence[Interval], b: Sequence[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for lo, hi in a:
        cur = lo
        for blo, bhi in b:
            if bhi <= cur:
                continue
            if blo >= hi:
                break
            if blo > cur:
                out.append((cur, blo))
            cur = max(cur, bhi)
            if cur >= hi:
                break
        if cur < hi:
            out.append((cur, hi))
    return tuple(i for i in out if i[0] < i[1])


def _interval_covers(cover: Sequence[Interval], lo: Fraction, hi: Fraction) -> bool:
    # closed cover of closed [lo, hi]; cover entries are disjoint and
    # non-touching, so a single entry must span the whole of it.
    for clo, chi in cover:
        if clo <= lo and hi <= chi:
            return True
        if clo > lo:
            break
    return False


def _interval_length(ivals: Sequence[Interval]) -> Fraction:
    return sum((hi - lo for lo, hi in ivals), Fraction(0))


# ---------------------------------------------------------------------------
# slab plumbing

def _merge_slab_runs(slabs: Iterable[Slab]) -> tuple[Slab, ...]:
    out: list[Slab] = []
    for x0, x1, ivals in slabs:
        if x0 >= x1 or not ivals:
            continue
        if out and out[-1][1] == x0 and out[-1][2] == ivals:
            out[-1] = (out[-1][0], x1, ivals)
        else:
            out.append((x0, x1, ivals))
    return tuple(out)


def _overlay(pieces: Sequence[Slab]) -> tuple[Slab, ...]:
    """Union of arbitrarily overlapping slab pieces into canonical slabs."""
    if not pieces:
        return ()
    xs = sorted({x for p in pieces for x in (p[0], p[1])})
    out: list[Slab] = []
    for x0, x1 in zip(xs, xs[1:]):
        ivals: tuple[Interval, ...] = ()
        for px0, px1, pv in pieces:
            if px0 <= x0 and x1 <= px1:
                ivals = _interval_union(ivals, pv)
        if ivals:
            out.append((x0, x1, ivals))
    return _merge_slab_runs(out)


def _slab_pairs(a: Sequence[Slab], b: Sequence[Slab]) -> Iterator[tuple[Fraction, Fraction, tuple[Interval, ...], tuple[Interval, ...]]]:
    """Walk the merged breakpoint grid of two decompositions."""
    xs = sorted({x for s in a for x in (s[0], s[1])} | {x for s in b for x in (s[0], s[1])})
    ai = bi = 0
    for x0, x1 in zip(xs, xs[1:]):
        while ai < len(a) and a[ai][1] <= x0:
            ai += 1
        while bi < len(b) and b[bi][1] <= x0:
            bi += 1
        av = a[ai][2] if ai < len(a) and a[ai][0] <= x0 and x1 <= a[ai][1] else ()
        bv = b[bi][2] if bi < len(b) and b[bi][0] <= x0 and x1 <= b[bi][1] else ()
        yield x0, x1, av, bv


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region2D:
    """A regular closed rectilinear region, canonical by construction.

    Build instances with from_rings / box / rect_ring or the boolean ops;
    the raw constructor expects already-canonical slabs.
    """

    slabs: tuple[Slab, ...]

    @staticmethod
    def empty() -> "Region2D":
        return _EMPTY

    @staticmethod
    def box(x0, y0, x1, y1) -> "Region2D":
        x0, y0, x1, y1 = _frac(x0), _frac(y0), _frac(x1), _frac(y1)
        if x0 >= x1 or y0 >= y1:
            return _EMPTY
        return Region2D(((x0, x1, ((y0, y1),)),))

    @staticmethod
    def square(half_side) -> "Region2D":
        h = _frac(half_side)
        return Region2D.box(-h, -h, h, h)

    @staticmethod
    def from_rings(rings: Iterable[Sequence[Point]]) -> "Region2D":
        return Region2D(_slabs_from_rings([tuple(r) for r in rings]))

    # -- predicates ---------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.slabs

    def contains_point(self, x, y) -> bool:
        x, y = _frac(x), _frac(y)
        for x0, x1, ivals in self.slabs:
            if x0 <= x <= x1 and any(lo <= y <= hi for lo, hi in ivals):
                return True
        return False

    def bounding_box(self) -> tuple[Fraction, Fraction, Fraction, Fraction] | None:
        if not self.slabs:
            return None
        ylo = min(s[2][0][0] for s in self.slabs)
        yhi = max(s[2][-1][1] for s in self.slabs)
        return (self.slabs[0][0], ylo, self.slabs[-1][1], yhi)

    def area(self) -> Fraction:
        return sum(((x1 - x0) * _interval_length(iv) for x0, x1, iv in self.slabs), Fraction(0))

    # -- derived polygon view ------------------------------------------------

    @cached_property
    def rings(self) -> tuple[tuple[Point, ...], ...]:
        """Simple closed rings (even-odd fill), CCW, sorted by least vertex."""
        return _trace_rings(self.slabs)

    def __hash__(self) -> int:
        return hash(self.slabs)


_EMPTY = Region2D(())


# ---------------------------------------------------------------------------
# rings -> slabs (even-odd parity scan)

def _slabs_from_rings(rings: Sequence[tuple[Point, ...]]) -> tuple[Slab, ...]:
    hedges: list[tuple[Fraction, Fraction, Fraction]] = []  # (y, xlo, xhi)
    xs: set[Fraction] = set()
    for ring in rings:
        if len(ring) < 4:
            raise NonRectilinearRegion(f"ring with {len(ring)} vertices cannot be rectilinear")
        pts = [(_frac(x), _frac(y)) for x, y in ring]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
            if x0 == x1 and y0 == y1:
                raise NonRectilinearRegion("zero-length edge")
            if x0 != x1 and y0 != y1:
                raise NonRectilinearRegion(f"diagonal edge {(x0, y0)} -> {(x1, y1)}")
            xs.add(x0)
            if y0 == y1:
                hedges.append((y0, min(x0, x1), max(x0, x1)))
    bps = sorted(xs)
    slabs: list[Slab] = []
    for x0, x1 in zip(bps, bps[1:]):
        ys = sorted(y for y, xlo, xhi in hedges if xlo <= x0 and x1 <= xhi)
        if len(ys) % 2:
            raise NonRectilinearRegion("unclosed ring (odd crossing parity)")
        ivals = _merge_intervals((ys[i], ys[i + 1]) for i in range(0, len(ys), 2))
        if ivals:
            slabs.append((x0, x1, ivals))
    return _merge_slab_runs(slabs)


# ---------------------------------------------------------------------------
# slabs -> rings (boundary tracing)

_LEFT = {(1, 0): (0, 1), (0, 1): (-1, 0), (-1, 0): (0, -1), (0, -1): (1, 0)}
_RIGHT = {d: l for l, d in _LEFT.items()}


def _trace_rings(slabs: tuple[Slab, ...]) -> tuple[tuple[Point, ...], ...]:
    if not slabs:
        return ()
    edges: list[tuple[Point, Point]] = []

    # horizontal edges, interior on the left
    for x0, x1, ivals in slabs:
        for y0, y1 in ivals:
            edges.append(((x0, y0), (x1, y0)))
            edges.append(((x1, y1), (x0, y1)))

    # vertical edges at every breakpoint where the cross-section changes
    bps = sorted({x for s in slabs for x in (s[0], s[1])})
    by_start = {s[0]: s for s in slabs}
    by_end = {s[1]: s for s in slabs}
    for x in bps:
        left = by_end.get(x, (None, None, ()))[2]
        right = by_start.get(x, (None, None, ()))[2]
        cuts = sorted({y for iv in left for y in iv} | {y for iv in right for y in iv})

        def _pieces(ivals: tuple[Interval, ...]) -> Iterator[Interval]:
            for lo, hi in ivals:
                inner = [c for c in cuts if lo < c < hi]
                for a, b in zip([lo] + inner, inner + [hi]):
                    yield (a, b)

        for lo, hi in _pieces(_interval_difference(left, right)):
            edges.append(((x, lo), (x, hi)))       # interior on the left: up
        for lo, hi in _pieces(_interval_difference(right, left)):
            edges.append(((x, hi), (x, lo)))       # interior on the right: down

    outgoing: dict[Point, dict[tuple[int, int], Point]] = {}
    for start, end in edges:
        d = (_sign(end[0] - start[0]), _sign(end[1] - start[1]))
        outgoing.setdefault(start, {})[d] = end
    used: set[tuple[Point, Point]] = set()

    rings: list[tuple[Point, ...]] = []
    for start, end in sorted(edges):
        if (start, end) in used:
            continue
        walk = [start]
        cur, prev_d = start, None
        while True:
            if prev_d is None:
                d = (_sign(end[0] - cur[0]), _sign(end[1] - cur[1]))
            else:
                options = outgoing.get(cur, {})
                for cand in (_LEFT[prev_d], prev_d, _RIGHT[prev_d]):
                    if cand in options and (cur, options[cand]) not in used:
                        d = cand
                        break
                else:
                    raise GeometryError("boundary trace dead-ended (corrupt slabs)")
            nxt = outgoing[cur][d]
            used.add((cur, nxt))
            prev_d = d
            cur = nxt
            if cur == start:
                break
            walk.append(cur)
        for ring in _split_pinches(_drop_collinear(walk)):
            rings.append(_canonical_ring(ring))
    return tuple(sorted(rings))


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def _drop_collinear(ring: list[Point]) -> list[Point]:
    out = list(ring)
    changed = True
    while changed and len(out) > 4:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if (a[0] == b[0] == c[0]) or (a[1] == b[1] == c[1]):
                del out[i]
                changed = True
                break
    return out


def _split_pinches(ring: list[Point]) -> list[list[Point]]:
    seen: dict[Point, int] = {}
    for i, p in enumerate(ring):
        if p in seen:
            first = seen[p]
            inner = ring[first:i]
            outer = ring[:first] + ring[i:]
            return _split_pinches(inner) + _split_pinches(outer)
        seen[p] = i
    return [ring]


def _canonical_ring(ring: list[Point]) -> tuple[Point, ...]:
    area2 = sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(ring, ring[1:] + ring[:1]))
    if area2 < 0:
        ring = [ring[0]] + ring[:0:-1]
    k = min(range(len(ring)), key=lambda i: ring[i])
    return tuple(ring[k:] + ring[:k])


# ---------------------------------------------------------------------------
# boolean algebra

BoolOp = Literal["union", "intersection", "difference"]

_INTERVAL_OPS = {
    "union": _interval_union,
    "intersection": _interval_intersection,
    "difference": _interval_difference,
}


def boolean_op(kind: BoolOp, a: Region2D, b: Region2D) -> Region2D:
    try:
        op = _INTERVAL_OPS[kind]
    except KeyError:
        raise GeometryError(f"unknown boolean op {kind!r}") from None
    out = [(x0, x1, op(av, bv)) for x0, x1, av, bv in _slab_pairs(a.slabs, b.slabs)]
    return Region2D(_merge_slab_runs(out))


def union(a: Region2D, b: Region2D) -> Region2D:
    return boolean_op("union", a, b)


def intersection(a: Region2D, b: Region2D) -> Region2D:
    return boolean_op("intersection", a, b)


def difference(a: Region2D, b: Region2D) -> Region2D:
    return boolean_op("difference", a, b)


def region_contains(outer: Region2D, inner: Region2D) -> bool:
    """True iff inner is a subset of outer (as closed regions)."""
    for _x0, _x1, outer_iv, inner_iv in _slab_pairs(outer.slabs, inner.slabs):
        for lo, hi in inner_iv:
            if not _interval_covers(outer_iv, lo, hi):
                return False
    return True


def dilate(region: Region2D, radius) -> Region2D:
    """Minkowski sum with the closed axis-aligned square of the given radius."""
    r = _frac(radius)
    if r < 0:
        raise GeometryError("dilation radius must be non-negative")
    if r == 0 or region.is_empty():
        return region
    pieces = [
        (x0 - r, x1 + r, tuple((lo - r, hi + r) for lo, hi in ivals))
        for x0, x1, ivals in region.slabs
    ]
    return Region2D(_overlay([(x0, x1, _merge_intervals(iv)) for x0, x1, iv in pieces]))


def erode(region: Region2D, radius) -> Region2D:
    """Points whose surrounding square of the given radius stays in the region."""
    r = _frac(radius)
    if r < 0:
        raise GeometryError("erosion radius must be non-negative")
    if r == 0 or region.is_empty():
        return region
    x0, y0, x1, y1 = region.bounding_box()
    pad = 2 * r
    hull = Region2D.box(x0 - pad, y0 - pad, x1 + pad, y1 + pad)
    return difference(region, dilate(difference(hull, region), r))


# ---------------------------------------------------------------------------
# linear maps

@dataclass(frozen=True)
class LinearTransform2D:
    """2x2 rational matrix [[a, b], [c, d]] acting on column points."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @staticmethod
    def identity() -> "LinearTransform2D":
        return LinearTransform2D(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @staticmethod
    def scaling(factor) -> "LinearTransform2D":
        f = _frac(factor)
        return LinearTransform2D(f, Fraction(0), Fraction(0), f)

    @staticmethod
    def of(a, b, c, d) -> "LinearTransform2D":
        return LinearTransform2D(_frac(a), _frac(b), _frac(c), _frac(d))

    def determinant(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def apply_point(self, p: Point) -> Point:
        x, y = p
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def is_axis_preserving(self) -> bool:
        return (self.b == 0 and self.c == 0) or (self.a == 0 and self.d == 0)


def compose_transforms(outer: LinearTransform2D, inner: LinearTransform2D) -> LinearTransform2D:
    return LinearTransform2D(
        outer.a * inner.a + outer.b * inner.c,
        outer.a * inner.b + outer.b * inner.d,
        outer.c * inner.a + outer.d * inner.c,
        outer.c * inner.b + outer.d * inner.d,
    )


def invert_transform(t: LinearTransform2D) -> LinearTransform2D:
    det = t.determinant()
    if det == 0:
        raise SingularTransform(f"transform {t} is singular")
    return LinearTransform2D(t.d / det, -t.b / det, -t.c / det, t.a / det)


def transform_region(t: LinearTransform2D, region: Region2D) -> Region2D:
    if t.determinant() == 0:
        raise SingularTransform(f"transform {t} is singular")
    if not t.is_axis_preserving():
        raise NonRectilinearRegion(
            "transform does not preserve axis alignment; rectilinear regions "
            "only support diagonal or antidiagonal matrices"
        )
    return Region2D.from_rings(
        [tuple(t.apply_point(p) for p in ring) for ring in region.rings]
    )


# ---------------------------------------------------------------------------
# 3D prisms

@dataclass(frozen=True)
class Prism3D:
    """A cross-section extruded along z over the closed range [z_low, z_high]."""

    cross_section: Region2D
    z_low: Fraction
    z_high: Fraction

    def __post_init__(self):
        object.__setattr__(self, "z_low", _frac(self.z_low))
        object.__setattr__(self, "z_high", _frac(self.z_high))
        if self.z_low >= self.z_high:
            raise GeometryError(f"prism needs z_low < z_high, got [{self.z_low}, {self.z_high}]")


# ---------------------------------------------------------------------------
# raster oracle: an independent containment check by grid sampling
#
# Membership is decided per sample point by ray parity against the polygon
# rings (not the slabs), with half-open [lo, hi) edge spans so points exactly
# on an edge resolve deterministically.  Sample rows/columns are mapped to
# exact rational thresholds first; numpy only ever sees integer indices.

def _ring_vertical_edges(rings: Sequence[Sequence[Point]]) -> Iterator[tuple[Fraction, Fraction, Fraction]]:
    for ring in rings:
        for (x0, y0), (x1, y1) in zip(ring, tuple(ring[1:]) + (ring[0],)):
            if x0 == x1:
                yield (x0, min(y0, y1), max(y0, y1))


def rasterize(region: Region2D, bbox: tuple[Fraction, Fraction, Fraction, Fraction], grid_n: int) -> np.ndarray:
    """Boolean grid of cell-center membership over bbox, row-major [iy, ix]."""
    x0, y0, x1, y1 = (_frac(v) for v in bbox)
    if x0 >= x1 or y0 >= y1:
        raise GeometryError("raster bounding box is degenerate")
    w, h = x1 - x0, y1 - y0
    toggles = np.zeros((grid_n, grid_n), dtype=np.int64)

    def _ceil(v: Fraction) -> int:
        return -((-v.numerator) // v.denominator)

    def col_from(x: Fraction) -> int:
        # least k with center x0 + (2k+1) w / (2n) >= x
        return max(_ceil(((x - x0) * 2 * grid_n / w - 1) / 2), 0)

    def row_span(ylo: Fraction, yhi: Fraction) -> tuple[int, int]:
        # rows j with ylo <= center(j) < yhi, center(j) = y0 + (2j+1) h / (2n)
        j0 = _ceil(((ylo - y0) * 2 * grid_n / h - 1) / 2)
        j1 = _ceil(((yhi - y0) * 2 * grid_n / h - 1) / 2)
        return max(j0, 0), min(max(j1, 0), grid_n)

    for ex, eylo, eyhi in _ring_vertical_edges(region.rings):
        j0, j1 = row_span(eylo, eyhi)
        if j0 >= j1:
            continue
        k = col_from(ex)
        if k >= grid_n:
            continue
        toggles[j0:j1, k] += 1
    return (np.cumsum(toggles, axis=1) % 2).astype(bool)


def raster_region_contains(outer: Region2D, inner: Region2D, grid_n: int = 512,
                           bbox: tuple | None = None) -> bool:
    """Sampled containment check; independent of the exact slab machinery."""
    if grid_n < 64:
        raise GeometryError("raster grid must be at least 64x64")
    if inner.is_empty():
        return True
    boxes = [r.bounding_box() for r in (outer, inner) if r.bounding_box() is not None]
    if bbox is None:
        bbox = (
            min(b[0] for b in boxes), min(b[1] for b in boxes),
            max(b[2] for b in boxes), max(b[3] for b in boxes),
        )
    outer_mask = rasterize(outer, bbox, grid_n)
    inner_mask = rasterize(inner, bbox, grid_n)
    return not bool(np.any(inner_mask & ~outer_mask))
