"""Exception types raised across the package."""


class FractalError(Exception):
    """Base class for all package errors."""


class DomainError(FractalError, ValueError):
    """A parameter or mass value lies outside the admissible range."""


class CapacityError(FractalError, ValueError):
    """A requested construction exceeds a configured size limit."""


class GeometryError(FractalError, ValueError):
    """IFS maps do not form a connected curve."""


class DimensionError(FractalError, ValueError):
    """No similarity dimension exists in [1, 2] for the given ratios."""


class SingularityError(FractalError, ArithmeticError):
    """The mass coordinate is locally constant, so a quotient is undefined."""


class ConvergenceError(FractalError, ArithmeticError):
    """An iterative refinement did not reach its tolerance.

    The last two iterates are kept on the instance for inspection.
    """

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last


class SchemaError(FractalError, ValueError):
    """A run configuration failed validation.

    ``path`` is the dotted location of the offending key (``noise.mu``) and
    ``pointer`` the equivalent JSON pointer (``/noise/mu``).
    """

    def __init__(self, message, path=""):
        self.path = path
        self.detail = message
        self.pointer = "/" + path.replace(".", "/") if path else ""
        where = f"{path}: " if path else ""
        super().__init__(where + message)


class StateError(FractalError, RuntimeError):
    """An operation needs data that has not been computed yet."""
