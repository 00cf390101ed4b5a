"""Backend selection for the hot kernels.

The compiled extension ``ridgerate._kernels`` is used when it imports
successfully; otherwise, or when the environment variable
``RIDGERATE_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
numpy implementations in ``ridgerate._fallback`` are used.  ``BACKEND``
records which one is active.
"""
from __future__ import annotations

import os

from . import _fallback

_want_pure = os.environ.get("RIDGERATE_PURE_PYTHON", "") not in ("", "0")

if _want_pure:
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

bspline_values = _impl.bspline_values
bspline_columns = _impl.bspline_columns
ridge_eval = _impl.ridge_eval
ridge_eval_grad = _impl.ridge_eval_grad
exp_sum = _impl.exp_sum
minplus_dp = _impl.minplus_dp

__all__ = [
    "BACKEND",
    "bspline_values",
    "bspline_columns",
    "ridge_eval",
    "ridge_eval_grad",
    "exp_sum",
    "minplus_dp",
]
