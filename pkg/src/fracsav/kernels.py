"""Backend selection for the hot loops.

The compiled extension is used when it was built; set ``FRACSAV_BACKEND=python``
to force the numpy fallback.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _pykernels}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

_requested = os.environ.get("FRACSAV_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "cython"):
    raise ImportError(f"FRACSAV_BACKEND must be 'python' or 'cython', got {_requested!r}")
if _requested == "cython" and _compiled is None:
    raise ImportError("FRACSAV_BACKEND=cython but the compiled extension is not built")
if _requested == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]
kernel_row = _impl.kernel_row
history_sum = _impl.history_sum
