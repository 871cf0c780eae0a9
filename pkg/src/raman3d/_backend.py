"""Pick the compiled kernels when available, the numpy fallback otherwise.

Set ``RAMAN3D_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by the cross-backend tests).
"""

import os

from . import _pykernels

if os.environ.get("RAMAN3D_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

COMPILED = kernels is not _pykernels


def available_backends():
    """Name -> kernel module for every backend importable in this environment."""
    found = {"python": _pykernels}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
