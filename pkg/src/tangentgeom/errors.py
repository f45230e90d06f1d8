"""Exception hierarchy shared by every module of the package."""


class GeometryError(Exception):
    """Base class for all errors raised by tangentgeom."""


class ExprSyntaxError(GeometryError, ValueError):
    """Malformed field expression; ``position`` is a 0-based character offset."""

    def __init__(self, position, message):
        self.position = position
        self.message = message
        super().__init__(f"at position {position}: {message}")


class UnknownSymbol(GeometryError, ValueError):
    pass


class DomainError(GeometryError, ArithmeticError):
    """log/sqrt of a non-positive value, division by zero, bad power base."""


class UnknownManifold(GeometryError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BadParams(GeometryError, ValueError):
    pass


class OutsideChart(GeometryError, ValueError):
    pass


class DegenerateInput(GeometryError, ValueError):
    pass


class SingularMetric(GeometryError, ArithmeticError):
    pass


class DegeneratePlane(GeometryError, ValueError):
    pass


class NonPositiveScaling(GeometryError, ValueError):
    pass


class ZeroFiber(GeometryError, ValueError):
    pass


class ChartExit(GeometryError):
    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"trajectory left the chart box at t={t:.6g}")


class NonFiniteState(GeometryError, ArithmeticError):
    pass


class ParallelVectors(GeometryError, ValueError):
    pass


class ConfigError(GeometryError, ValueError):
    pass
