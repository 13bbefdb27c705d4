"""Backend selection for the displacement kernels.

The compiled extension is used when it imports; otherwise the NumPy
fallback. Set ``IONTOMO_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("IONTOMO_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

displacement_matrix = _impl.displacement_matrix
displacement_sum = _impl.displacement_sum

__all__ = ["BACKEND", "displacement_matrix", "displacement_sum"]
