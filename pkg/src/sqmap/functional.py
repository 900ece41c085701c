"""The extremal functional S and per-component image data.

For a normalized conformal map f on a domain with compact complementary
components S_j, the image components K_j = closure of f-side complement have
Euclidean areas A_j and vertical variations V_j, and

    S(f) = 2*pi*Re(a1) + sum_j (V_j**2 - A_j),
    L_alpha(f) = Re(exp(i*alpha) * a1).

S is minimized exactly by the map onto a square domain, L_alpha by the map
onto a parallel slit domain; this module evaluates both together with
injectivity diagnostics for competitor maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import LineString, Point as _ShPoint, Polygon as _ShPolygon

from .errors import MeshTooCoarseError
from .geometry import (
    BoundaryCurve,
    curve_is_simple,
    discretize_boundary,
    signed_enclosed_area,
    square_boundary_distance,
)
from .laurent import Coefficient, coefficient_a1

__all__ = [
    "ImageComponent",
    "FunctionalReport",
    "InjectivityReport",
    "SlitSpec",
    "image_components",
    "functional_S",
    "functional_L",
    "check_injectivity",
    "best_fit_square",
    "transverse_extent",
    "winding_number",
    "DEFAULT_MESH",
    "AREA_CLAMP",
]

DEFAULT_MESH = 2e-3
AREA_CLAMP = 1e-12


@dataclass(frozen=True)
class SlitSpec:
    """Slit direction for the functional L_alpha.

    ``angle`` is in radians, reduced mod 2*pi internally; angle 0 means
    slits parallel to the imaginary axis (vertical slits).
    """

    angle: float

    @property
    def reduced_angle(self) -> float:
        return self.angle % (2.0 * math.pi)

    @property
    def direction(self) -> complex:
        """Unit vector along the slit line."""
        return 1j * complex(np.exp(0.5j * self.reduced_angle))

    @property
    def transverse(self) -> complex:
        """Unit vector across the slit line."""
        return complex(np.exp(0.5j * self.reduced_angle))

    @property
    def is_vertical(self) -> bool:
        return self.reduced_angle == 0.0


@dataclass(frozen=True, eq=False)
class ImageComponent:
    """One complementary component of the image domain."""

    index: int
    curve: BoundaryCurve
    area: float
    vertical_variation: float
    horizontal_variation: float
    square_defect: float
    best_square_center: complex
    best_square_side: float
    simple: bool


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    first_violation: str | None = None
    curve_simple: tuple = ()
    pairwise_ok: bool = True
    winding_ok: tuple = ()

    def __bool__(self) -> bool:
        return self.injective


@dataclass(frozen=True, eq=False)
class FunctionalReport:
    a1: Coefficient
    components: tuple
    S_value: float
    L_values: dict
    injective: bool
    injectivity: InjectivityReport
    mesh: float


# ---------------------------------------------------------------------------
# image-side analysis


def _source_curves(domain, mesh, min_samples=16):
    return [
        discretize_boundary(c, samples_per_unit=1.0 / mesh, min_samples=min_samples, parent_index=j)
        for j, c in enumerate(domain.components)
    ]


def _push_curves(map_, source_curves):
    out = []
    for src in source_curves:
        img = map_.evaluate_path(src.samples)
        closed = np.append(img, img[0])
        spacing = float(np.max(np.abs(np.diff(closed)))) if img.size > 1 else 0.0
        out.append(
            BoundaryCurve(img, src.orientation, src.parent_index, src.degenerate, spacing)
        )
    return out


def _injectivity_from_curves(image_curves) -> InjectivityReport:
    """Conditions (a) simple, (b) pairwise disjoint and non-nested, (c) winding +1.

    Degenerate source curves (points, slits) are exempt from (a) and (c):
    their images retrace themselves by construction, which says nothing
    about injectivity of the map on the open domain.
    """
    simple_flags = []
    winding_flags = []
    rings = []
    polys = []
    first = None
    for curve in image_curves:
        if curve.degenerate or len(curve) < 3:
            simple_flags.append(True)
            winding_flags.append(True)
            rings.append(_as_shape(curve.samples))
            polys.append(None)
            continue
        simple = curve_is_simple(curve.samples)
        simple_flags.append(simple)
        rings.append(_as_shape(curve.samples))
        if not simple:
            winding_flags.append(False)
            polys.append(None)
            if first is None:
                first = f"non-simple image curve (component {curve.parent_index})"
            continue
        poly = _ShPolygon(np.column_stack([curve.samples.real, curve.samples.imag]))
        polys.append(poly)
        probe = poly.representative_point()
        w = winding_number(curve.samples, complex(probe.x, probe.y))
        ok = w == curve.orientation
        winding_flags.append(ok)
        if not ok and first is None:
            first = (
                f"image curve traversed with winding {w} instead of "
                f"{curve.orientation} (component {curve.parent_index})"
            )
    pairwise_ok = True
    n = len(image_curves)
    for i in range(n):
        for j in range(i + 1, n):
            if rings[i].intersects(rings[j]):
                pairwise_ok = False
                if first is None:
                    first = f"image curves intersect (components {i}, {j})"
            elif polys[i] is not None and polys[i].contains(rings[j]):
                pairwise_ok = False
                if first is None:
                    first = f"nested image curves (component {j} inside {i})"
            elif polys[j] is not None and polys[j].contains(rings[i]):
                pairwise_ok = False
                if first is None:
                    first = f"nested image curves (component {i} inside {j})"
    injective = all(simple_flags) and all(winding_flags) and pairwise_ok
    return InjectivityReport(
        injective, first, tuple(simple_flags), pairwise_ok, tuple(winding_flags)
    )


def _as_shape(samples):
    pts = np.asarray(samples, dtype=complex)
    if pts.size == 1:
        return _ShPoint(pts[0].real, pts[0].imag)
    xy = np.column_stack([pts.real, pts.imag])
    return LineString(np.vstack([xy, xy[:1]]))


def winding_number(samples, w0) -> int:
    """Winding of the closed sampled curve around w0."""
    v = np.asarray(samples, dtype=complex) - complex(w0)
    ang = np.angle(v)
    d = np.diff(np.append(ang, ang[0]))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return int(round(float(np.sum(d)) / (2.0 * math.pi)))


def _component_data(map_, domain, image_curves, with_square_defect, simple_flags=None):
    comps = []
    exact = map_.is_identity
    for j, curve in enumerate(image_curves):
        source = domain.components[j]
        if exact:
            area = source.area
            vv = source.vertical_variation
            hh = source.horizontal_variation
        else:
            area = abs(signed_enclosed_area(curve.samples))
            if area < AREA_CLAMP:
                area = 0.0
            vv = float(np.ptp(curve.samples.imag)) if len(curve) > 1 else 0.0
            hh = float(np.ptp(curve.samples.real)) if len(curve) > 1 else 0.0
        if with_square_defect:
            if exact and source.side_length is not None:
                defect, center, side = 0.0, source.center, source.side_length
            else:
                defect, center, side = best_fit_square(curve.samples)
        else:
            defect, center, side = math.nan, 0j, math.nan
        simple = True if simple_flags is None else simple_flags[j]
        comps.append(
            ImageComponent(j, curve, float(area), vv, hh, defect, center, side, simple)
        )
    return comps


def image_components(map_, domain, mesh=DEFAULT_MESH, with_square_defect=True):
    """Push each component boundary through the map and measure the images.

    Returns one ImageComponent per complementary component with its enclosed
    area, vertical and horizontal variation, distance to the best-fit
    axis-aligned square, and a simplicity flag.
    """
    sources = _source_curves(domain, mesh)
    images = _push_curves(map_, sources)
    report = _injectivity_from_curves(images)
    return _component_data(map_, domain, images, with_square_defect, report.curve_simple)


def functional_S(map_, domain, mesh=DEFAULT_MESH, alphas=(), with_square_defect=True):
    """Evaluate S(f) = 2*pi*Re(a1) + sum(V_j**2 - A_j) on the domain.

    Non-injective maps are not refused: the report carries the flag and the
    value, which optimizers use as a penalized objective.  For the identity
    the component data come from the exact shape descriptors, so S is exact.
    """
    a1 = coefficient_a1(map_)
    sources = _source_curves(domain, mesh)
    images = _push_curves(map_, sources)
    inj = _injectivity_from_curves(images)
    comps = _component_data(map_, domain, images, with_square_defect, inj.curve_simple)
    s_value = 2.0 * math.pi * a1.alpha + sum(
        c.vertical_variation**2 - c.area for c in comps
    )
    l_values = {float(a): functional_L(map_, a) for a in alphas}
    return FunctionalReport(a1, tuple(comps), float(s_value), l_values, inj.injective, inj, mesh)


def functional_L(map_, alpha) -> float:
    """L_alpha(f) = Re(exp(i*alpha) * a1), with alpha reduced mod 2*pi."""
    spec = SlitSpec(float(alpha))
    a1 = complex(coefficient_a1(map_).value)
    return float((np.exp(1j * spec.reduced_angle) * a1).real)


def check_injectivity(map_, domain, mesh=DEFAULT_MESH, max_gap=None) -> InjectivityReport:
    """Boundary-image test for injectivity of the map on the domain.

    True iff every non-degenerate image curve is simple, image curves are
    pairwise disjoint and non-nested, and each is traversed exactly once
    with the orientation of its source.  Degenerate boundary images make the
    test conservative: such maps may be flagged even when injective.
    """
    sources = _source_curves(domain, mesh)
    images = _push_curves(map_, sources)
    _require_resolved(images, max_gap)
    return _injectivity_from_curves(images)


def _require_resolved(image_curves, max_gap):
    for curve in image_curves:
        if curve.degenerate or len(curve) < 3:
            continue
        if max_gap is None:
            diam = math.hypot(
                float(np.ptp(curve.samples.real)), float(np.ptp(curve.samples.imag))
            )
            bound = 0.05 * max(diam, 1e-30)
        else:
            bound = max_gap
        if curve.spacing > bound:
            raise MeshTooCoarseError(
                f"image sample gap {curve.spacing:.3g} exceeds {bound:.3g} "
                f"(component {curve.parent_index}); refine the mesh"
            )


# ---------------------------------------------------------------------------
# squareness diagnostics


_UNIT_SQUARE_BOUNDARY = None


def _unit_square_boundary(n=256):
    global _UNIT_SQUARE_BOUNDARY
    if _UNIT_SQUARE_BOUNDARY is None or _UNIT_SQUARE_BOUNDARY.size != n:
        t = np.arange(n) / n * 4.0
        side = np.floor(t).astype(int)
        frac = t - side
        pts = np.empty(n, dtype=complex)
        pts[side == 0] = -0.5 - 0.5j + frac[side == 0]
        pts[side == 1] = 0.5 - 0.5j + 1j * frac[side == 1]
        pts[side == 2] = 0.5 + 0.5j - frac[side == 2]
        pts[side == 3] = -0.5 + 0.5j - 1j * frac[side == 3]
        _UNIT_SQUARE_BOUNDARY = pts
    return _UNIT_SQUARE_BOUNDARY


def best_fit_square(points, tol=1e-9, max_sweeps=80, max_points=1200):
    """Best axis-aligned square fit in Hausdorff distance.

    Seeds at the bounding-box center with side equal to the mean of the two
    variations, then runs cyclic coordinate descent with step halving down
    to ``tol``.  Returns (defect, center, side).
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("no points to fit")
    if pts.size == 1 or (np.ptp(pts.real) == 0.0 and np.ptp(pts.imag) == 0.0):
        return 0.0, complex(pts[0]), 0.0
    if pts.size > max_points:
        stride = int(math.ceil(pts.size / max_points))
        pts = pts[::stride]
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    unit = _unit_square_boundary()

    def defect_of(cx, cy, side):
        c = complex(cx, cy)
        if side <= 0.0:
            return float(np.max(np.abs(pts - c)))
        d1 = float(np.max(np.abs(square_boundary_distance(pts, c, side))))
        sq = c + side * unit
        d2 = float(np.max(tree.query(np.column_stack([sq.real, sq.imag]))[0]))
        return max(d1, d2)

    h = float(np.ptp(pts.real))
    v = float(np.ptp(pts.imag))
    x = [
        float(0.5 * (pts.real.min() + pts.real.max())),
        float(0.5 * (pts.imag.min() + pts.imag.max())),
        0.5 * (h + v),
    ]
    best = defect_of(*x)
    scale = max(x[2], h, v, 1e-12)
    steps = [0.25 * scale] * 3
    for _ in range(max_sweeps):
        if max(steps) < tol:
            break
        for i in range(3):
            if steps[i] < tol:
                continue
            improved = False
            for sign in (1.0, -1.0):
                trial = list(x)
                trial[i] += sign * steps[i]
                val = defect_of(*trial)
                if val < best:
                    best, x = val, trial
                    improved = True
                    break
            if not improved:
                steps[i] *= 0.5
    return float(best), complex(x[0], x[1]), float(x[2])


def transverse_extent(points, alpha) -> float:
    """Extent of the point set across the slit line of angle alpha."""
    spec = SlitSpec(float(alpha))
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size < 2:
        return 0.0
    proj = (pts * np.conj(spec.transverse)).real
    return float(np.ptp(proj))
