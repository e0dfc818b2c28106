"""Select the kernel implementation at import time.

The compiled ``_ckernels`` extension is used when it was built; otherwise
the numpy fallback in ``_kernels``.  Setting the environment variable
``HKMTEST_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels as _py
from .exceptions import InvalidDataError

kernels = _py
name = "python"

if not os.environ.get("HKMTEST_PURE_PYTHON"):
    try:
        from . import _ckernels as _c
    except ImportError:  # extension not built
        _c = None
    if _c is not None:
        kernels = _c
        name = "cython"


def get(backend=None):
    """Return the kernel module for ``backend`` ('cython', 'python' or None)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _py
    if backend == "cython":
        from . import _ckernels

        return _ckernels
    raise InvalidDataError(f"unknown backend {backend!r}; choose from {available()}")


def available():
    """Names of the importable backends."""
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names
