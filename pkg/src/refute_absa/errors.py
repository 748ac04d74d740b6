"""Exception hierarchy shared across the package."""


class RefuteAbsaError(Exception):
    """Base class for all package errors."""


class ParseError(RefuteAbsaError):
    """A CSV row could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(RefuteAbsaError):
    """Input data violates a contract (negative counts, non-positive prices, ...)."""


class InsufficientDataError(RefuteAbsaError):
    """Not enough usable observations for the requested operation."""


class ConfigError(RefuteAbsaError):
    """Invalid or inconsistent configuration value."""


class DegenerateDesignError(RefuteAbsaError):
    """The regression design is rank deficient or the treatment is constant."""


class InvalidLagError(RefuteAbsaError):
    """The HAC lag is incompatible with the sample size."""


class UnstableTestError(RefuteAbsaError):
    """Too many resampling iterations failed for a refutation verdict to be trusted."""


class GenerationError(RefuteAbsaError):
    """A synthetic scenario produced invalid panels."""
