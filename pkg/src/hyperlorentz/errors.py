class HyperLorentzError(Exception):
    """Base class for errors raised by this package."""


class DomainError(HyperLorentzError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(HyperLorentzError, ValueError):
    """An input object does not satisfy the operation's hypotheses."""


class NumericalError(HyperLorentzError, ArithmeticError):
    """An iterative method failed to converge."""


class UnsupportedError(HyperLorentzError):
    """The requested case is deliberately not implemented."""
