"""Kernel dispatch: compiled Cython kernels when built, numpy otherwise.

Set ``BMOTV_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from bmotv import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("BMOTV_PURE_PYTHON") != "1":
    try:
        from bmotv import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

cantor_eval = _impl.cantor_eval
cantor_primitive = _impl.cantor_primitive
cantor_window = _impl.cantor_window
max_disjoint_sum = _impl.max_disjoint_sum
cantor_moments = _pykernels.cantor_moments

__all__ = [
    "BACKEND",
    "cantor_eval",
    "cantor_primitive",
    "cantor_window",
    "cantor_moments",
    "max_disjoint_sum",
]
