"""Exception types raised across the package."""


class TateError(Exception):
    """Base class for every error raised by this package."""


class CompositionNonzero(TateError):
    pass


class NotChainMap(TateError):
    pass


class InvalidComplex(TateError):
    pass


class WindowMismatch(TateError):
    pass


class NonInvertiblePivot(TateError):
    pass


class NotExactAtChainLevel(TateError):
    pass


class GridTooSmall(TateError):
    pass


class NotTateTriple(TateError):
    pass


class ZeroVector(TateError):
    pass


class BadParams(TateError):
    pass


class InvalidWeights(TateError):
    pass


class BadParity(TateError):
    pass


class RequiresRationalCoefficients(TateError):
    pass


class DensityUnverified(TateError):
    pass


class Inconclusive(TateError):
    pass


class StepFailure(TateError):
    pass


class ParseError(TateError):
    pass
