"""Exception types shared across the package."""


class SingHomeoError(Exception):
    """Base class for all package errors."""


class DomainError(SingHomeoError, ValueError):
    """A point or interval lies outside the domain of the operation."""


class InvariantError(SingHomeoError, ValueError):
    """An object violates a structural invariant (monotonicity, bounds, ...)."""


class PreconditionError(SingHomeoError, ValueError):
    """Parameters do not satisfy an operation's precondition."""


class UnsupportedExpression(SingHomeoError, TypeError):
    """The estimator cannot handle this kind of expression exactly."""


class ConfigError(SingHomeoError, ValueError):
    """Malformed configuration, expression text or serialized object."""
