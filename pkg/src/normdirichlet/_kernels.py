"""Selects the compiled kernel when available, else the Python fallback.

Set NORMDIRICHLET_PURE_PYTHON=1 before import to force the fallback.
"""
import os

if os.environ.get("NORMDIRICHLET_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernels as _impl
        BACKEND = "python"

lagrange_reduce = _impl.lagrange_reduce
envelope_min_sq = _impl.envelope_min_sq
