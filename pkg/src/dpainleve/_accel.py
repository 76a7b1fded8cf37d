"""Numba switch.

Set ``DP_NUMBA=0`` to force the pure numpy/cmath code paths. Numba is
optional: if it cannot be imported the fallback is used silently.
"""
import os

_FLAG = os.environ.get("DP_NUMBA", "1").strip().lower()
WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = WANT_NUMBA and HAVE_NUMBA


def njit(fn):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
