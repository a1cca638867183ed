"""Exception hierarchy shared across the package."""


class SubCPPError(Exception):
    """Base class for all package errors."""


class NotNormalizableError(SubCPPError):
    """The subordinator has an infinite mean and cannot satisfy E[Lambda_1] = 1."""


class NotNormalizedError(SubCPPError):
    """An entry point needing E[Lambda_1] = 1 received a subordinator that violates it."""


class InfiniteActivityError(SubCPPError):
    """The operation needs a finite-activity (compound Poisson) subordinator."""


class PreconditionError(SubCPPError):
    """Mathematical precondition of an asymptotic result does not hold."""


class NetProfitViolated(PreconditionError):
    """Premium rate does not exceed the expected claims per unit time."""


class HeavyTailError(PreconditionError):
    """Light-tail machinery requested for a heavy-tailed claims process."""


class NoRootError(PreconditionError):
    """The adjustment function stays negative up to the boundary of its domain."""


class IntegratedTailUnavailable(SubCPPError):
    """The integrated-tail (ladder height) law of Z cannot be sampled exactly."""


class ConfigError(SubCPPError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.line = line
        where = field if line is None else f"{field} (line {line})"
        super().__init__(f"{where}: {message}")


class InvariantViolation(SubCPPError):
    """A result contradicts a guaranteed mathematical property (internal error)."""
