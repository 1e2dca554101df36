"""Exception types shared across the package."""


class BitTablesError(Exception):
    """Base class for package-specific errors."""


class ContradictionError(BitTablesError):
    """A forced fill would violate a margin; the partial table admits no completion."""


class DeadStateError(BitTablesError):
    """A sampler reached a state with no admissible continuation.

    Carries optional diagnostics describing where sampling ran aground.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class InfeasibleError(BitTablesError):
    """The requested instance has no solutions at all (distinct from a sampling dead end)."""


class ConditioningError(BitTablesError):
    """A conditional distribution was requested on an event of probability zero."""


class OracleLimitError(BitTablesError):
    """An exact-counting request exceeds the configured size limits."""
