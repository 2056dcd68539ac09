"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`CoordescError`, which is
itself a ``ValueError`` so callers validating input can catch either.
"""


class CoordescError(ValueError):
    pass


class InvalidPartitionError(CoordescError):
    pass


class UndefinedRatioError(CoordescError):
    pass


class InvalidBoundsError(CoordescError):
    pass


class UnsupportedProxError(CoordescError):
    pass


class IneligibleCompositionError(CoordescError):
    pass


class EmptyDomainError(CoordescError):
    pass


class InvalidLipschitzError(CoordescError):
    pass


class InvalidDistributionError(CoordescError):
    pass


class ConfigurationError(CoordescError):
    pass


class UnsupportedSchemeError(CoordescError):
    pass


class InvalidStepError(CoordescError):
    pass


class InvalidWeightError(CoordescError):
    pass


class EmptyBatchError(CoordescError):
    pass


class NoAnchorError(CoordescError):
    pass


class ShapeError(CoordescError):
    pass


class CacheError(CoordescError):
    pass


class DegenerateColumnError(CoordescError):
    pass


class DegenerateDiagonalError(CoordescError):
    pass


class InvalidContinuationError(CoordescError):
    pass


class InvalidSupportError(CoordescError):
    pass


class InvalidRankError(CoordescError):
    pass


class InvalidCountError(CoordescError):
    pass


class UnsupportedReferenceError(CoordescError):
    pass


class OracleFailureError(CoordescError):
    pass


class DivergenceError(CoordescError):
    """A trial produced a non-finite objective."""


class FileError(CoordescError, OSError):
    pass
