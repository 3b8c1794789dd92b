"""Exception hierarchy; each class maps onto one CLI exit code."""


class HeckeDistError(Exception):
    exit_code = 1


class DomainError(HeckeDistError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 1


class NumericError(HeckeDistError, ArithmeticError):
    """Quadrature or root finding failed to reach the requested tolerance."""

    exit_code = 1

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DataIntegrityError(HeckeDistError):
    """Input data is malformed or violates a record invariant.

    ``problems`` collects ``(line, reason)`` pairs when several records fail.
    """

    exit_code = 2

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])


class TransportError(HeckeDistError):
    exit_code = 3
