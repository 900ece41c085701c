"""Finitely connected planar domains described by their compact complement.

A domain is the open connected subset of the extended plane containing
infinity whose complement consists of finitely many pairwise disjoint compact
components: points, disks, axis-aligned squares and rectangles, vertical or
horizontal slits, or simple polygons.  Components are stored as exact shape
descriptors, so areas and variations of the source domain are exact; sampled
curves are used only for image-side quantities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import LineString, Point as _ShPoint, Polygon as _ShPolygon

from .errors import SpecificationError

__all__ = [
    "CompactComponent",
    "Domain",
    "BoundaryCurve",
    "NonSimpleCurveWarning",
    "discretize_boundary",
    "vertical_variation",
    "horizontal_variation",
    "enclosed_area",
    "signed_enclosed_area",
    "curve_is_simple",
    "hausdorff_distance",
    "square_boundary_distance",
    "square_boundary_samples",
]

_BOX_KINDS = ("point", "axis_square", "axis_rectangle", "vertical_slit", "horizontal_slit")


class NonSimpleCurveWarning(UserWarning):
    """A sampled curve crossed itself where a Jordan curve was expected."""


@dataclass(frozen=True)
class CompactComponent:
    """One compact complementary component of a domain.

    Use the classmethod constructors; ``kind`` selects which numeric fields
    are meaningful.  Degenerate sizes (side 0, length 0) collapse exactly to
    points.
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    width: float = 0.0
    height: float = 0.0
    vertices: tuple = ()

    # -- constructors ------------------------------------------------------

    @classmethod
    def point(cls, location):
        return cls("point", complex(location))

    @classmethod
    def disk(cls, center, radius):
        if radius <= 0:
            raise SpecificationError(f"disk radius must be positive, got {radius}")
        return cls("disk", complex(center), radius=float(radius))

    @classmethod
    def axis_square(cls, center, side):
        if side < 0:
            raise SpecificationError(f"square side must be nonnegative, got {side}")
        return cls("axis_square", complex(center), width=float(side), height=float(side))

    @classmethod
    def axis_rectangle(cls, center, width, height):
        if width < 0 or height < 0:
            raise SpecificationError("rectangle width/height must be nonnegative")
        return cls("axis_rectangle", complex(center), width=float(width), height=float(height))

    @classmethod
    def vertical_slit(cls, center, length):
        if length < 0:
            raise SpecificationError(f"slit length must be nonnegative, got {length}")
        return cls("vertical_slit", complex(center), height=float(length))

    @classmethod
    def horizontal_slit(cls, center, length):
        if length < 0:
            raise SpecificationError(f"slit length must be nonnegative, got {length}")
        return cls("horizontal_slit", complex(center), width=float(length))

    @classmethod
    def polygon(cls, vertices):
        verts = tuple(complex(v) for v in vertices)
        if len(verts) < 3:
            raise SpecificationError("polygon needs at least 3 vertices")
        signed = _signed_polygon_area(verts)
        if signed == 0.0:
            raise SpecificationError("polygon vertices are collinear (zero area)")
        if signed < 0:
            verts = verts[::-1]
        if not _polygon_is_simple(verts):
            raise SpecificationError("polygon vertex list self-intersects")
        centroid = _polygon_centroid(verts)
        return cls("polygon", centroid, vertices=verts)

    # -- exact descriptors -------------------------------------------------

    @property
    def area(self) -> float:
        if self.kind == "disk":
            return math.pi * self.radius**2
        if self.kind == "polygon":
            return abs(_signed_polygon_area(self.vertices))
        return self.width * self.height

    @property
    def vertical_variation(self) -> float:
        if self.kind == "disk":
            return 2.0 * self.radius
        if self.kind == "polygon":
            ys = [v.imag for v in self.vertices]
            return max(ys) - min(ys)
        return self.height

    @property
    def horizontal_variation(self) -> float:
        if self.kind == "disk":
            return 2.0 * self.radius
        if self.kind == "polygon":
            xs = [v.real for v in self.vertices]
            return max(xs) - min(xs)
        return self.width

    @property
    def is_degenerate(self) -> bool:
        """True when the component has empty interior (point or slit)."""
        if self.kind in ("disk", "polygon"):
            return False
        return self.width == 0.0 or self.height == 0.0

    @property
    def is_point_like(self) -> bool:
        return self.kind == "point" or (
            self.kind in _BOX_KINDS and self.width == 0.0 and self.height == 0.0
        )

    @property
    def side_length(self) -> float | None:
        """Side of the component viewed as a possibly degenerate axis square.

        Returns ``None`` for shapes that are not squares or points.
        """
        if self.is_point_like:
            return 0.0
        if self.kind in ("axis_square", "axis_rectangle") and self.width == self.height:
            return self.width
        return None

    @property
    def is_vertical_slit_like(self) -> bool:
        return self.is_point_like or (self.kind in _BOX_KINDS and self.width == 0.0)

    @property
    def bounding_box(self):
        """(xmin, xmax, ymin, ymax) of the component."""
        if self.kind == "disk":
            c, r = self.center, self.radius
            return (c.real - r, c.real + r, c.imag - r, c.imag + r)
        if self.kind == "polygon":
            xs = [v.real for v in self.vertices]
            ys = [v.imag for v in self.vertices]
            return (min(xs), max(xs), min(ys), max(ys))
        c = self.center
        return (
            c.real - self.width / 2,
            c.real + self.width / 2,
            c.imag - self.height / 2,
            c.imag + self.height / 2,
        )

    @property
    def anchor(self) -> complex:
        """Natural interior anchor (centroid) for pole placement."""
        return self.center


@dataclass(frozen=True)
class Domain:
    """Complement description of a finitely connected domain containing infinity."""

    components: tuple = ()

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for i, c in enumerate(comps):
            if not isinstance(c, CompactComponent):
                raise SpecificationError(f"component {i} is not a CompactComponent")
            for coord in c.bounding_box:
                if not math.isfinite(coord):
                    raise SpecificationError(f"component {i} is unbounded")
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                if component_distance(comps[i], comps[j]) <= 0.0:
                    raise SpecificationError(
                        f"components {i} and {j} have touching or overlapping closures"
                    )

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def is_square_domain(self) -> bool:
        """All components are points or axis-parallel squares (possibly degenerate)."""
        return all(c.side_length is not None for c in self.components)

    @property
    def is_vertical_slit_domain(self) -> bool:
        return all(c.is_vertical_slit_like for c in self.components)

    @property
    def bounding_radius(self) -> float:
        """Radius of a disk about 0 containing every component."""
        r = 0.0
        for c in self.components:
            x0, x1, y0, y1 = c.bounding_box
            r = max(r, math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1))))
        return r

    def identity_functional_sum(self) -> float:
        """Sum of V_j^2 - A_j over the source shapes, computed exactly."""
        return float(sum(c.vertical_variation**2 - c.area for c in self.components))


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed sampled curve; the last sample connects back to the first.

    Degenerate components (points, slits) carry degenerate curves: a single
    sample for a point, a doubly traced segment for a slit.
    """

    samples: np.ndarray
    orientation: int = 1
    parent_index: object = None
    degenerate: bool = False
    spacing: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise SpecificationError("curve samples must be a nonempty 1-d sequence")
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size

    @property
    def closed_samples(self) -> np.ndarray:
        """Samples with the first point appended again at the end."""
        return np.append(self.samples, self.samples[0])

    def reversed(self) -> "BoundaryCurve":
        return BoundaryCurve(
            self.samples[::-1].copy(),
            -self.orientation,
            self.parent_index,
            self.degenerate,
            self.spacing,
        )


# ---------------------------------------------------------------------------
# discretization


def discretize_boundary(component, samples_per_unit, min_samples=8, parent_index=None):
    """Sample the positively oriented boundary of a component.

    Consecutive samples are at most ``1/samples_per_unit`` apart in arc
    length, and at least ``min_samples`` points are produced for
    non-degenerate components.  Point components return a single-sample
    degenerate curve; slits return the doubly traced segment.
    """
    if samples_per_unit <= 0:
        raise SpecificationError("samples_per_unit must be positive")
    if min_samples < 1:
        raise SpecificationError("min_samples must be at least 1")

    if component.is_point_like:
        loc = component.center if component.kind != "point" else component.center
        return BoundaryCurve(np.array([loc]), 1, parent_index, degenerate=True, spacing=0.0)

    if component.kind == "disk":
        r = component.radius
        n = max(int(min_samples), int(math.ceil(2 * math.pi * r * samples_per_unit)), 3)
        theta = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
        pts = component.center + r * np.exp(1j * theta)
        spacing = 2 * r * math.sin(math.pi / n)
        return BoundaryCurve(pts, 1, parent_index, degenerate=False, spacing=spacing)

    if component.kind in _BOX_KINDS:
        x0, x1, y0, y1 = component.bounding_box
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        pts = _walk_polyline(corners, samples_per_unit, min_samples)
        return BoundaryCurve(
            pts, 1, parent_index, degenerate=component.is_degenerate, spacing=_max_gap(pts)
        )

    if component.kind == "polygon":
        pts = _walk_polyline(list(component.vertices), samples_per_unit, min_samples)
        return BoundaryCurve(pts, 1, parent_index, degenerate=False, spacing=_max_gap(pts))

    raise SpecificationError(f"unknown component kind {component.kind!r}")


def _walk_polyline(corners, samples_per_unit, min_samples):
    edges = []
    k = len(corners)
    for i in range(k):
        a, b = corners[i], corners[(i + 1) % k]
        if a != b:
            edges.append((a, b, abs(b - a)))
    if not edges:
        return np.array([corners[0]])
    counts = [max(1, int(math.ceil(length * samples_per_unit))) for _, _, length in edges]
    total = sum(counts)
    if total < min_samples:
        boost = int(math.ceil(min_samples / total))
        counts = [c * boost for c in counts]
    pts = []
    for (a, b, _), n in zip(edges, counts):
        t = np.arange(n) / n
        pts.append(a + (b - a) * t)
    return np.concatenate(pts)


def _max_gap(pts):
    closed = np.append(pts, pts[0])
    return float(np.max(np.abs(np.diff(closed)))) if pts.size > 1 else 0.0


# ---------------------------------------------------------------------------
# curve measurements


def vertical_variation(curve) -> float:
    """Max minus min of the imaginary part over the curve samples."""
    pts = _curve_points(curve)
    return float(np.ptp(pts.imag)) if pts.size > 1 else 0.0


def horizontal_variation(curve) -> float:
    """Max minus min of the real part over the curve samples."""
    pts = _curve_points(curve)
    return float(np.ptp(pts.real)) if pts.size > 1 else 0.0


def signed_enclosed_area(curve) -> float:
    """Shoelace area with sign; positive for counterclockwise traversal.

    Equals the trapezoid rule for (1/2i) times the contour integral of
    ``conj(w) dw``, which is exact on polygons.
    """
    pts = _curve_points(curve)
    if pts.size < 3:
        return 0.0
    nxt = np.roll(pts, -1)
    return float(0.5 * np.sum(np.conj(pts) * nxt).imag)


def enclosed_area(curve, check_simple=True) -> float:
    """Absolute enclosed (shoelace) area of a closed sampled curve.

    Non-simple curves are reported through ``NonSimpleCurveWarning`` unless
    the curve is degenerate by construction; the area value is still
    returned so callers can treat it as a diagnostic.
    """
    pts = _curve_points(curve)
    degenerate = bool(getattr(curve, "degenerate", False))
    if check_simple and not degenerate and pts.size >= 3 and not curve_is_simple(pts):
        warnings.warn("curve is not simple; enclosed area is unreliable", NonSimpleCurveWarning)
    return abs(signed_enclosed_area(pts))


def curve_is_simple(curve) -> bool:
    """True when the closed polyline through the samples has no self-crossings."""
    pts = _curve_points(curve)
    if pts.size < 3:
        return True
    keep = np.append(True, np.abs(np.diff(pts)) > 0)
    pts = pts[keep]
    if pts.size >= 2 and pts[-1] == pts[0]:
        pts = pts[:-1]
    if pts.size < 3:
        return True
    xy = np.column_stack([pts.real, pts.imag])
    ring = LineString(np.vstack([xy, xy[:1]]))
    return bool(ring.is_simple)


def _curve_points(curve) -> np.ndarray:
    if isinstance(curve, BoundaryCurve):
        return curve.samples
    return np.asarray(curve, dtype=complex)


# ---------------------------------------------------------------------------
# point-set distances


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two sampled point sets."""
    pa = _as_xy(a)
    pb = _as_xy(b)
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))


def square_boundary_distance(points, center, side):
    """Distance from each point to the boundary of an axis-aligned square."""
    p = np.asarray(points, dtype=complex) - complex(center)
    h = side / 2.0
    ax = np.abs(p.real) - h
    ay = np.abs(p.imag) - h
    outside = np.hypot(np.maximum(ax, 0.0), np.maximum(ay, 0.0))
    inside = -np.maximum(ax, ay)
    return np.where((ax <= 0.0) & (ay <= 0.0), inside, outside)


def square_boundary_samples(center, side, n=256) -> np.ndarray:
    """n points along the boundary of an axis-aligned square."""
    comp = CompactComponent.axis_square(center, side)
    if side == 0.0:
        return np.array([complex(center)])
    spu = max(n, 4) / (4.0 * side)
    return discretize_boundary(comp, spu, min_samples=max(n, 4)).samples


def _as_xy(points) -> np.ndarray:
    pts = _curve_points(points)
    return np.column_stack([pts.real, pts.imag])


# ---------------------------------------------------------------------------
# exact pairwise separation


def component_distance(a, b) -> float:
    """Exact distance between the closures of two components.

    Zero or negative values mean the closures touch, overlap, or one
    contains the other.
    """
    if a.kind == "disk" and b.kind == "disk":
        return abs(a.center - b.center) - a.radius - b.radius
    if a.kind == "disk":
        return _point_set_distance(a.center, b) - a.radius
    if b.kind == "disk":
        return _point_set_distance(b.center, a) - b.radius
    if a.kind in _BOX_KINDS and b.kind in _BOX_KINDS:
        return _box_box_distance(a.bounding_box, b.bounding_box)
    return float(_as_shapely(a).distance(_as_shapely(b)))


def _point_set_distance(z, comp) -> float:
    if comp.kind in _BOX_KINDS:
        x0, x1, y0, y1 = comp.bounding_box
        dx = max(x0 - z.real, 0.0, z.real - x1)
        dy = max(y0 - z.imag, 0.0, z.imag - y1)
        return math.hypot(dx, dy)
    if comp.kind == "disk":
        return abs(z - comp.center) - comp.radius
    return float(_as_shapely(comp).distance(_ShPoint(z.real, z.imag)))


def _box_box_distance(bb1, bb2) -> float:
    ax0, ax1, ay0, ay1 = bb1
    bx0, bx1, by0, by1 = bb2
    dx = max(bx0 - ax1, ax0 - bx1)
    dy = max(by0 - ay1, ay0 - by1)
    if dx < 0 and dy < 0:
        return max(dx, dy)  # overlapping: negative
    return math.hypot(max(dx, 0.0), max(dy, 0.0))


def _as_shapely(comp):
    if comp.kind == "polygon":
        return _ShPolygon([(v.real, v.imag) for v in comp.vertices])
    if comp.kind in _BOX_KINDS:
        x0, x1, y0, y1 = comp.bounding_box
        if x0 == x1 and y0 == y1:
            return _ShPoint(x0, y0)
        if x0 == x1 or y0 == y1:
            return LineString([(x0, y0), (x1, y1)])
        return _ShPolygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    raise SpecificationError(f"no shapely form for kind {comp.kind!r}")


def _signed_polygon_area(vertices) -> float:
    arr = np.asarray(vertices, dtype=complex)
    nxt = np.roll(arr, -1)
    return float(0.5 * np.sum(np.conj(arr) * nxt).imag)


def _polygon_is_simple(vertices) -> bool:
    xy = [(v.real, v.imag) for v in vertices]
    ring = LineString(xy + xy[:1])
    return bool(ring.is_simple)


def _polygon_centroid(vertices) -> complex:
    arr = np.asarray(vertices, dtype=complex)
    nxt = np.roll(arr, -1)
    cross = (np.conj(arr) * nxt).imag
    a = 0.5 * np.sum(cross)
    c = np.sum((arr + nxt) * cross) / (6.0 * a)
    return complex(c)
