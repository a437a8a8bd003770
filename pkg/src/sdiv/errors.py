"""Exception types raised across the package."""


class SdivError(Exception):
    """Base class. ``module`` names the subsystem that raised."""

    module = "sdiv"

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module


class ValidationError(SdivError, ValueError):
    """Input violates a matrix or state invariant."""


class DomainError(SdivError, ValueError):
    """Parameter outside the domain where a quantity is defined."""


class ResourceError(SdivError, MemoryError):
    """Requested dimension exceeds the configured cap."""


class DegenerateInputError(SdivError, ValueError):
    """Input is a degenerate case the routine does not handle (e.g. rho == sigma)."""
