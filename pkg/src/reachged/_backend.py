"""Kernel backend selection.

The compiled Cython module is used when it was built; set
``REACHGED_BACKEND=python`` to force the numpy fallback.
"""
import os

from reachged import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("REACHGED_BACKEND", "").lower() not in ("python", "numpy", "fallback"):
    try:
        from reachged import _kernels as kernels  # noqa: F811
        BACKEND = "compiled"
    except ImportError:  # extension not built
        pass


def available():
    """Names of every backend importable in this environment, mapped to its module."""
    found = {"python": _fallback}
    try:
        from reachged import _kernels
        found["compiled"] = _kernels
    except ImportError:
        pass
    return found
