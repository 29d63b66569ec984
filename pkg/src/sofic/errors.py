"""Exception types shared across the package."""


class SoficError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SoficError):
    """Malformed input document or violated operation precondition."""


class EmptyShiftError(ValidationError):
    """The graph presents the empty shift (trimming removed every vertex)."""


class ResourceCapError(SoficError):
    """A subset or monoid closure exceeded its configured size cap."""
