"""Kernel backend selection: compiled extension if built, NumPy otherwise.

Set ``PROXYZOO_FORCE_NUMPY=1`` to force the fallback (used by the benchmark
script to compare both paths).
"""

import os

if os.environ.get("PROXYZOO_FORCE_NUMPY", "0") == "1":
    from . import _kernels_np as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _rotation_kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_np as _impl

        BACKEND = "numpy"

rotation_from_params = _impl.rotation_from_params
rotation_and_dexp = _impl.rotation_and_dexp


def backend_name() -> str:
    return BACKEND
