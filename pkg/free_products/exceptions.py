"""Errors raised by the free products engines."""


class FreeProductsError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(FreeProductsError, ValueError):
    """Malformed partition input: overlaps, gaps, crossings or mismatched ground sets."""


class DomainError(FreeProductsError, ValueError):
    """A mathematical precondition does not hold."""


class TruncationError(DomainError):
    """A sequence is shorter than the order requested from it."""

    def __init__(self, needed: int, available: int, what: str = "sequence") -> None:
        self.needed = needed
        self.available = available
        super().__init__(f"{what} known to order {available}, order {needed} requested (short by {needed - available})")


class ResourceLimitError(FreeProductsError, RuntimeError):
    """An enumeration ceiling would be exceeded."""
