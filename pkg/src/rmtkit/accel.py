"""Numba acceleration toggle.

Hot kernels in :mod:`rmtkit.kernels` exist in two variants: an ``@njit``
compiled one and a pure numpy/scipy one. Setting the environment variable
``RMTKIT_NO_NUMBA=1`` (or numba being unavailable) selects the fallback
path for the whole process. The choice is made once at import time.
"""

import os

_disabled = os.environ.get("RMTKIT_NO_NUMBA", "").strip() in {"1", "true", "yes"}

if not _disabled:
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled


def jit_or_none(func):
    """Compile with njit(cache=True) when the accelerated path is active."""
    if USE_NUMBA:
        from numba import njit

        return njit(cache=True)(func)
    return None
