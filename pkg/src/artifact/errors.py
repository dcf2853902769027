"""Exception types shared across the package."""


class ArtifactError(Exception):
    """Base class for all library errors."""


class NotPrime(ArtifactError):
    pass


class NoSuchSubfield(ArtifactError):
    pass


class DenominatorDivisibleByP(ArtifactError):
    pass


class ContextMismatch(ArtifactError):
    pass


class RamificationTooSmall(ArtifactError):
    pass


class ZeroDivisor(ArtifactError):
    pass


class NegativeTwistUnrepresentable(ArtifactError):
    pass


class InseparableOperand(ArtifactError):
    pass


class NotAUnit(ArtifactError):
    pass


class DivergentTail(ArtifactError):
    pass


class DigitOutOfRange(ArtifactError):
    pass


class WeightBoundViolated(ArtifactError):
    pass


class ATRangeUnsupported(ArtifactError):
    pass


class DimensionMismatch(ArtifactError):
    pass


class EnumerationInvalid(ArtifactError):
    pass


class NotSubClosed(ArtifactError):
    pass


class InsufficientPrecision(ArtifactError):
    pass


class BudgetExceeded(ArtifactError):
    pass


class ConfigError(ArtifactError):
    """Invalid command line or configuration input."""
