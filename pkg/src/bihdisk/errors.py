"""Exception hierarchy shared by all solver modules."""


class BihdiskError(Exception):
    """Base class for every error raised by this package."""


class NonInvertible(BihdiskError):
    """Element lies in (or numerically at) the radical of the algebra."""


class GridTooSmall(BihdiskError):
    """Finite-difference grid has too few points for the requested stencil."""


class ConfigError(BihdiskError):
    """Invalid run configuration or map/grid parameters."""


class ExponentOutOfRange(BihdiskError):
    """Corner exponent pair (alpha, beta) violates the admissibility conditions."""


class MapViolation(BihdiskError):
    """A difference quotient of the map vanished where the map hypotheses forbid it."""


class NodeOnCorner(BihdiskError):
    """A quadrature node coincides with a corner preimage."""


class SingularityUnresolved(BihdiskError):
    """Local panel refinement near a singular point failed to stabilize."""


class SingularSystem(BihdiskError):
    """Collocation matrix condition estimate exceeds the configured threshold."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PathExitsDomain(BihdiskError):
    """An integration path leaves the open unit disk."""


class DataSingularAtCorner(BihdiskError):
    """Boundary data grows faster near a corner than its declared exponent allows."""
