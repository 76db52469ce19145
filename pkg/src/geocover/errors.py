"""Exception types raised across the discretization pipeline."""


class GeoCoverError(Exception):
    """Base class for all package errors."""


class DegenerateOverlap(GeoCoverError):
    """Two segments share a sub-segment; the perturbation was too small."""


class DegeneracyUnresolved(GeoCoverError):
    """The input is still degenerate after the perturbation policy ran."""


class SingularTransform(GeoCoverError):
    pass


class NotConvex(GeoCoverError):
    pass


class InvalidPolygon(GeoCoverError):
    pass


class CapExceeded(GeoCoverError):
    """An instance is larger than a brute-force routine accepts."""


class UncoveredPoint(GeoCoverError):
    """A translate family leaves some point uncovered."""
