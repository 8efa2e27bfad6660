"""Exception and warning types raised across the package."""


class UConvexError(Exception):
    """Base class for all package errors."""


class NonFiniteInput(UConvexError, ValueError):
    pass


class DimensionMismatch(UConvexError, ValueError):
    pass


class NoBoundary(UConvexError):
    pass


class OriginNotInterior(UConvexError, ValueError):
    pass


class OutsidePoint(UConvexError, ValueError):
    pass


class ChordNotRealizable(UConvexError):
    pass


class OutOfRange(UConvexError, ValueError):
    pass


class ConfigMissing(UConvexError, ValueError):
    pass


class NonEuclideanNorm(UConvexError, ValueError):
    pass


class EmptyIntersection(UConvexError):
    pass


class EmptyIntersectionSuspected(UConvexError):
    pass


class GaugeUnbounded(UConvexError):
    pass


class InfeasiblePoint(UConvexError, ValueError):
    pass


class KernelParallel(UConvexError):
    pass


class HypothesisViolated(UConvexError):
    pass


class BodyLoadError(UConvexError, ValueError):
    """Malformed or unknown body/manifest description."""


class DegenerateFaceWarning(UserWarning):
    """The maximizer of a linear functional over a body is not unique."""


class NotConvergedWarning(UserWarning):
    pass
