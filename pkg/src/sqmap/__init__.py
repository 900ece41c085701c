"""Extremal conformal maps onto square and parallel-slit domains.

The package evaluates the extremal functional
``S(f) = 2*pi*Re(a1) + sum_j (V_j**2 - A_j)`` over conformal maps normalized
as ``f(z) = z + a1/z + ...`` at infinity, reproduces the rectangle-probe
modulus estimates behind its minimality, and recovers square-domain and
parallel-slit uniformizers by derivative-free minimization.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    MeshTooCoarseError,
    PoleProximityError,
    PropertyViolation,
    SpecificationError,
    SqmapError,
)
from .geometry import (
    BoundaryCurve,
    CompactComponent,
    Domain,
    discretize_boundary,
    enclosed_area,
    hausdorff_distance,
    horizontal_variation,
    vertical_variation,
)

__all__ = [
    "__version__",
    "SqmapError",
    "SpecificationError",
    "PoleProximityError",
    "ConvergenceError",
    "MeshTooCoarseError",
    "PropertyViolation",
    "CompactComponent",
    "Domain",
    "BoundaryCurve",
    "discretize_boundary",
    "vertical_variation",
    "horizontal_variation",
    "enclosed_area",
    "hausdorff_distance",
]
