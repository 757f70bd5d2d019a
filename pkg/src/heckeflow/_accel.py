"""Optional numba acceleration.

Set ``HECKEFLOW_DISABLE_JIT=1`` to run every kernel as plain Python (batch
operations then use numpy-vectorized fallbacks).  The flag is read once at
import time.
"""

from __future__ import annotations

import os

JIT_DISABLED = os.environ.get("HECKEFLOW_DISABLE_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    if JIT_DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def jit(func):
    """``numba.njit(cache=True)`` when available and enabled, identity otherwise.

    The undecorated function stays reachable as ``.py_func`` in both cases.
    """
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func


def using_jit() -> bool:
    return HAVE_NUMBA
