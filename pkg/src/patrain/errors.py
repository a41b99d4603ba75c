"""Exception types shared across the package."""


class PatrainError(Exception):
    """Base class for all errors raised by this package."""


class RankDeficiencyError(PatrainError):
    """Design matrix is rank deficient or too ill conditioned to invert."""


class IllConditionedBasisError(PatrainError):
    """Basis-change matrix is singular or numerically not invertible."""


class InvalidNoiseError(PatrainError):
    """Noise variance is not strictly positive."""


class PilotAllocationError(PatrainError):
    """Requested pilot count is incompatible with the design order."""


class DimensionMismatchError(PatrainError):
    """Inputs that must share a dimension do not."""


class CsvFormatError(PatrainError):
    """A CSV file does not follow the expected schema."""
