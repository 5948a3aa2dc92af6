"""Exception types shared across the package.

The split matters: a DomainError or PreconditionError means the caller fed us
something outside a documented contract, while an InvariantViolation means a
construction that is guaranteed by theory failed its own self-check, i.e. a
bug in this package.  Verification of candidate pairs never raises; verifiers
return failure objects instead.
"""


class SpectileError(Exception):
    pass


class ParseError(SpectileError, ValueError):
    """Malformed set literal; carries the offending position when known."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DomainError(SpectileError, ValueError):
    """Input outside the operation's domain (wrong group shape, d not a divisor, ...)."""


class PreconditionError(SpectileError, ValueError):
    """A documented precondition does not hold for otherwise well-formed input."""


class InvariantViolation(SpectileError, RuntimeError):
    """A theorem-backed construction failed to verify.  Always a bug."""
