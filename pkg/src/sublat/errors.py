"""Exception hierarchy.

Every validation failure derives from :class:`ValidationError`, which is a
``ValueError`` so callers that only care about bad input can catch that.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition or invariant."""


class NotADivisor(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ChainConditionError(ValidationError):
    """Intermediate divisor k does not satisfy m | k | not-not-m."""


class InvalidEvidence(ValidationError):
    pass


class InvalidSelection(ValidationError):
    pass


class MissingValue(ValidationError, KeyError):
    """A set or lattice function was queried at a point where it has no value."""

    def __str__(self):
        return ValueError.__str__(self)
