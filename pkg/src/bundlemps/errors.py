"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DimensionError(ValidationError):
    pass


class SymmetryError(ValidationError):
    pass


class PhaseError(ValidationError):
    """A Pauli string with an odd number of y factors was requested as real."""


class RankZeroError(ValidationError):
    """Truncation discarded every singular value."""


class TraceMismatchError(ValidationError):
    pass


class NormalizationError(ValidationError):
    pass


class ResourceError(RuntimeError):
    pass


class CacheIntegrityError(RuntimeError):
    pass
