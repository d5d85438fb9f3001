"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``CONVEXTIME_PURE_PYTHON=1``
to force the numpy fallback (the benchmark and the kernel tests do this).
"""

import os

from . import _pykernels

_impl = _pykernels
BACKEND = "python"

if not os.environ.get("CONVEXTIME_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"

OPTIMAL = _pykernels.OPTIMAL
UNBOUNDED = _pykernels.UNBOUNDED
ITERATION_LIMIT = _pykernels.ITERATION_LIMIT

simplex_iterate = _impl.simplex_iterate
bisect_hgauge = _impl.bisect_hgauge


def available_backends():
    """Return ``{name: module}`` for every kernel backend importable here."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
