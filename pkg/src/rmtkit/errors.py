"""Exception types shared across the toolkit."""


class RmtkitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(RmtkitError):
    """Invalid configuration or argument."""


class NumericalError(RmtkitError):
    """A numerical routine could not complete (non-convergence, near-singularity)."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class EigenConvergenceError(NumericalError):
    """QR/QL iteration hit the iteration cap; carries deflation progress."""
