"""Backend selection for the point-enumeration kernels."""

import os

try:
    if os.environ.get("ULM_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from ._kernels import count_points, enumerate_points

    BACKEND = "compiled"
except ImportError:
    from ._kernels_py import count_points, enumerate_points

    BACKEND = "python"

from ._kernels_py import ALL, FIXED, INVERSE, NONZERO

__all__ = ["ALL", "BACKEND", "FIXED", "INVERSE", "NONZERO", "count_points", "enumerate_points"]
