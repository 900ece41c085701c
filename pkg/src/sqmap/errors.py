"""Exception types shared across the package."""


class SqmapError(Exception):
    """Base class for package-specific failures."""


class SpecificationError(SqmapError, ValueError):
    """A domain, map, or experiment description is invalid."""


class PoleProximityError(SqmapError, ValueError):
    """Evaluation was requested at or too close to a pole of a map."""


class ConvergenceError(SqmapError, RuntimeError):
    """An iterative numerical procedure failed to converge."""


class MeshTooCoarseError(SqmapError, ValueError):
    """Sampled curves are too coarse for a reliable geometric predicate."""


class PropertyViolation(SqmapError, RuntimeError):
    """A mathematically guaranteed inequality failed beyond tolerance."""
