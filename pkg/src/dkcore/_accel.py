"""Numba switch for the loop kernels.

Set ``DKCORE_DISABLE_NUMBA=1`` to run without JIT. The dispatch layer in
:mod:`dkcore.kernels` then routes the bulk-synchronous paths to the
vectorized numpy implementations and runs the remaining sequential loops
in the interpreter.
"""
import os

_DISABLED = os.environ.get("DKCORE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("disabled by DKCORE_DISABLE_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    _njit = None
    HAS_NUMBA = False


def jit(fn):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if HAS_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn
