"""Selects between numba-compiled kernels and their pure-numpy fallbacks.

Set ``FACTORGAP_DISABLE_NUMBA=1`` in the environment to run every kernel
through the fallback path (useful for debugging and for the benchmark).
"""
import os

DISABLE_NUMBA = os.environ.get("FACTORGAP_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False
    _njit = None

USE_NUMBA = HAVE_NUMBA and not DISABLE_NUMBA


def njit(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAVE_NUMBA:  # pragma: no cover
        return func
    return _njit(cache=True, nogil=True)(func)


def pick(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
