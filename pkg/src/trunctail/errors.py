"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TruncTailError`
so callers (and the CLI) can map failures onto exit codes.
"""


class TruncTailError(Exception):
    """Base class for all library errors."""


class ConfigError(TruncTailError, ValueError):
    """A run configuration or distribution description is invalid."""


class InfiniteMoment(TruncTailError, ValueError):
    """A requested moment does not exist for the given law."""


class NumericalFailure(TruncTailError, ArithmeticError):
    """A numerical routine failed to deliver its contract."""


class QuadratureFailure(NumericalFailure):
    """Adaptive integration did not converge to the requested tolerance."""


class NoPositiveRoot(NumericalFailure):
    """The truncated MGF never crossed 1 for positive arguments."""


class ConvergenceError(NumericalFailure):
    """An iterative solver ran out of iterations."""


class BudgetExceeded(NumericalFailure):
    """A simulated path hit the configured step cap."""


class InsufficientSignal(NumericalFailure):
    """Monte Carlo estimates are too noisy for the requested fit."""


class CertificationError(TruncTailError):
    """A bound was requested outside the region where it is certified."""


class ThresholdViolation(CertificationError):
    """The truncation level does not exceed the certified threshold."""


class HypothesisViolation(CertificationError):
    """A hypothesis of a bound fails for the given law.

    The ``clause`` attribute names the failing condition.
    """

    def __init__(self, clause, message=None):
        self.clause = clause
        super().__init__(message or clause)


class DegenerateRetention(TruncTailError, ValueError):
    """The retention fraction ``a`` has an integer reciprocal."""
