"""Shared exception types."""


class CorrdynError(Exception):
    """Base class for all library errors."""


class InvalidInputError(CorrdynError):
    """The input violates a documented precondition."""


class RootFindingError(CorrdynError):
    """The simultaneous root iteration failed to converge."""


class ResourceLimitError(CorrdynError):
    """A computation was refused or aborted because it would blow up."""


class UndecidedError(CorrdynError):
    """No decision criterion applies to the given input."""
