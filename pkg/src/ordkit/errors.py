"""Exception types shared across the package."""

from __future__ import annotations


class OrdkitError(Exception):
    """Base class for all package errors."""


class GroupMismatchError(OrdkitError):
    """Operands come from different group instances."""


class ResourceLimitError(OrdkitError):
    """A configured cap (reduction steps, ball size, search budget) was hit."""


class IdentityElementError(OrdkitError):
    """A sign was requested for the identity element."""


class DomainError(OrdkitError):
    """A realization was asked for data outside its realized prefix."""


class ArchimedeanViolationError(OrdkitError):
    """Bracketing search detected non-Archimedean behavior."""
