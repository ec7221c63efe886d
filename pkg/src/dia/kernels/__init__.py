"""Image kernels used by the transform pipeline.

The jitted path is the default; set ``DIA_PURE_NUMPY=1`` to force the
pure-numpy implementations (also used automatically when numba is missing).
``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

from ._numpy import gaussian_kernel

__all__ = [
    "bilinear_resize",
    "gaussian_blur",
    "median_blur",
    "gaussian_kernel",
    "BACKEND",
]

if os.environ.get("DIA_PURE_NUMPY", "0") == "1":
    _use_numba = False
else:
    try:
        import numba  # noqa: F401

        _use_numba = True
    except ImportError:
        _use_numba = False

if _use_numba:
    from ._numba import bilinear_resize, gaussian_blur, median_blur

    BACKEND = "numba"
else:
    from ._numpy import bilinear_resize, gaussian_blur, median_blur

    BACKEND = "numpy"
