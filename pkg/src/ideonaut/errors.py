"""Exception types shared across the package."""


class IdeonautError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(IdeonautError, ValueError):
    """Two vectors that must share a dimension do not."""


class LambdaOutOfRange(IdeonautError, ValueError):
    """Blend coefficient is outside the regime the operation enforces."""


class ZeroNormError(IdeonautError, ValueError):
    """Operation requires a nonzero-norm vector."""


class InsufficientPopulation(IdeonautError, ValueError):
    """Not enough ideas in the manifold for the requested operation."""


class StrategyError(IdeonautError, ValueError):
    """Invalid or unknown exploration strategy configuration."""


class WeightsFormatError(IdeonautError, ValueError):
    """Projector weight stream is malformed, truncated, or inconsistent."""


class TransportError(IdeonautError):
    """A backend request failed after exhausting its retry budget.

    `status` carries the HTTP-like status code when one exists (0 for
    connection-level failures); `body` carries the error payload if any.
    """

    def __init__(self, message: str, status: int = 0, body: dict | None = None,
                 retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.body = body
        self.retryable = retryable


class ProtocolError(IdeonautError):
    """A backend replied with a payload that violates the wire contract."""


class JudgeParseError(IdeonautError, ValueError):
    """Judge reply could not be turned into a valid score card."""


class MetricsError(IdeonautError, ValueError):
    """Metrics are undefined for the given input (e.g. empty card list)."""


class TaskMismatch(IdeonautError, ValueError):
    """Two idea sets that must belong to the same task do not."""


class SchemaError(IdeonautError, ValueError):
    """A data file (tasks, baseline, mock world) violates its schema."""


class ConfigError(IdeonautError, ValueError):
    """Run configuration is invalid or contains unknown keys."""


class ReplayMismatch(IdeonautError):
    """Provenance replay reconstructed a different embedding than recorded."""
