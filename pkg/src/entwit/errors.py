"""Exception types shared across the package."""


class EntwitError(Exception):
    """Base class for package-specific errors."""


class UnsupportedCombinationError(EntwitError):
    """A protocol was asked to run on a state family it cannot handle."""


class OracleMismatchError(EntwitError):
    """Symbolic engine and dense oracle disagree beyond tolerance."""


class DimensionCapError(EntwitError):
    """A dense-oracle construction would exceed the size cap."""
