"""rmtkit: desk-scale experiments on inhomogeneous complex random matrices.

Smallest-singular-value tails, anti-concentration estimators (Levy
concentration, CRLCD, the P functional), sphere decompositions, and
ESD/circular-law universality probes, all on deterministic seed streams.
"""

from .errors import (
    EigenConvergenceError,
    NumericalError,
    RmtkitError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "RmtkitError",
    "ValidationError",
    "NumericalError",
    "EigenConvergenceError",
    "__version__",
]
