"""Exception and warning types shared across the package."""

from __future__ import annotations


class ZlabError(Exception):
    """Base class for all package errors."""


class PoleError(ZlabError):
    """Raised when a function is evaluated at one of its poles."""


class DivergenceError(ZlabError):
    """Raised when a defining series diverges at the requested argument."""


class DomainError(ZlabError):
    """Raised when arguments fall outside the region where a formula applies."""


class ConvergenceError(ZlabError):
    """Raised when a quadrature or truncation fails to meet its tolerance."""


class EmptySetError(ZlabError):
    """Raised when an index set that must be nonempty has no elements."""


class BoundaryStationaryWarning(UserWarning):
    """A stationary point sits exactly on an endpoint of the integration range."""
