"""Numba switch.

Set ``ARMCHAIR_DISABLE_NUMBA=1`` before import to force the pure-numpy paths.
"""

from __future__ import annotations

import os

_disabled = os.environ.get("ARMCHAIR_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    _njit = None


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAS_NUMBA:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def deco(f):
        return f

    return deco


__all__ = ["HAS_NUMBA", "njit"]
