"""Numba switch.

Hot kernels are decorated with :func:`njit` from this module.  Setting the
environment variable ``CCMNET_DISABLE_NUMBA=1`` (or running without numba
installed) turns the decorator into the identity, so the exact same kernel
source runs as plain Python over numpy arrays.
"""
import os

_DISABLED = os.environ.get("CCMNET_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def njit(*args, **kwargs):
    if HAS_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(func):
        return func
    return wrap


def backend():
    return "numba" if HAS_NUMBA else "python"
