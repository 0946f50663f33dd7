"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A truncated series failed to reach its tail tolerance."""
