"""Pick the compiled kernels when they import, else the numpy fallback.

Set ``HECKEDIST_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

fallback = _fallback

if os.environ.get("HECKEDIST_PURE_PYTHON"):
    kernels = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _fallback
        BACKEND = "python"
