"""Exception types raised across the package."""


class GuefluctError(Exception):
    """Base class for all package errors."""


class DomainError(GuefluctError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeMismatch(GuefluctError, ValueError):
    """A point was evaluated with an asymptotic formula outside its validity range."""


class QuadratureFailure(GuefluctError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance within its panel budget."""

    def __init__(self, message, *, panels=None, error_estimate=None):
        super().__init__(message)
        self.panels = panels
        self.error_estimate = error_estimate


class EigensolverFailure(GuefluctError, RuntimeError):
    """The tridiagonal eigensolver did not converge."""


class ConfigError(GuefluctError, ValueError):
    """An experiment or CLI configuration is invalid."""
