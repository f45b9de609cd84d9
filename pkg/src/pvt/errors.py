"""Exception types shared across the toolkit.

All three derive from ValueError so casual callers can catch broadly; the
CLI maps them to a nonzero exit code with the message on stderr.
"""


class DomainError(ValueError):
    """A value lies outside its physical or documented domain."""


class DimensionError(ValueError):
    """An array has the wrong shape, axis count or an incompatible size."""


class FormatError(ValueError):
    """A serialized payload violates an on-disk format contract."""
