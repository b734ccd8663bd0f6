"""Kernel dispatch: the compiled extension when it imports, else pure Python.

Set ``LAMBDACHI_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("LAMBDACHI_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

matmul = _impl.matmul
smith = _impl.smith
column_hermite = _impl.column_hermite
solve_echelon = _impl.solve_echelon
rank = _impl.rank
local_valuations = _impl.local_valuations

__all__ = [
    "BACKEND",
    "matmul",
    "smith",
    "column_hermite",
    "solve_echelon",
    "rank",
    "local_valuations",
]
