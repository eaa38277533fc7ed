"""Exception hierarchy.  Everything raised on purpose derives from HilmodError."""


class HilmodError(Exception):
    """Base class for library errors."""


class ArityError(HilmodError, ValueError):
    """Multi-index or point has the wrong number of variables."""


class DomainError(HilmodError, ValueError):
    """Point lies outside the domain shrunk by the safety margin."""


class TruncationError(HilmodError):
    """A truncated series or basis is too short for the requested accuracy."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class MethodError(HilmodError):
    """The chosen numerical method cannot be applied at this point."""


class InvariantUndefinedError(HilmodError):
    """The requested invariant does not exist (e.g. h for non-negative curvature)."""


class FrameDegeneracyError(HilmodError):
    """The Grammian of a frame is singular or not positive definite."""


class PrecisionError(HilmodError):
    """A numerical rank decision fell inside the ambiguity band."""


class InconclusiveFitError(HilmodError):
    """Finite differences of the dimension sequence did not stabilise."""


class NotAContractionError(HilmodError, ValueError):
    """Operator norm exceeds one."""


class UnsupportedPredicateError(HilmodError, ValueError):
    """Only vanishing at the origin is built in."""
