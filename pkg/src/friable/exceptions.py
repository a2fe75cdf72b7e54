"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FriableError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FriableError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class ResourceError(FriableError):
    """A configured size cap (sieve limit, enumeration size, breakpoints) was exceeded."""


class NumericalError(FriableError, ArithmeticError):
    """Adaptive quadrature failed to converge.

    ``interval`` holds the worst subinterval ``(lo, hi)`` and ``estimate``
    the last disagreement between the coarse and refined estimates there.
    """

    def __init__(self, message: str, interval: tuple[float, float] | None = None,
                 estimate: float | None = None):
        super().__init__(message)
        self.interval = interval
        self.estimate = estimate
