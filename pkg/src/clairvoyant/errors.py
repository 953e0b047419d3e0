"""Exception types shared across the package."""


class ClairvoyantError(Exception):
    pass


class DomainError(ClairvoyantError, ValueError):
    """A parameter lies outside the domain where the operation is defined."""


class SequenceExhausted(ClairvoyantError, IndexError):
    """An operation needed a position beyond the end of a finite prefix."""


class OracleLimitExceeded(ClairvoyantError):
    """The brute-force oracle was asked for a horizon it refuses to enumerate."""


class InsufficientOccurrences(ClairvoyantError):
    """The scanned prefix holds too few pattern occurrences to decide an event."""


class PreconditionFailed(ClairvoyantError):
    pass


class WideningExhausted(ClairvoyantError):
    """Window widening hit its cap while the verdict stayed inconclusive."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class DegenerateFit(ClairvoyantError, ValueError):
    pass
