"""Kernel backend selection.

The hot numeric kernels exist twice: a numba-jitted version and a pure
numpy fallback with identical signatures.  The active backend is chosen
once at import time from the ``MIMOBC_BACKEND`` environment variable:

* ``auto`` (default) -- numba when it imports cleanly, numpy otherwise
* ``numba``          -- require the jitted kernels, fail if unavailable
* ``numpy``          -- force the fallback path

Use ``get_kernels("numpy")`` / ``get_kernels("numba")`` to reach a specific
implementation regardless of the environment (benchmarks and equivalence
tests rely on this).
"""

import os
import warnings

ENV_VAR = "MIMOBC_BACKEND"

_VALID = ("auto", "numba", "numpy")


def _load(choice):
    if choice == "numpy":
        from . import _kernels_numpy
        return _kernels_numpy, "numpy"
    try:
        from . import _kernels_numba
        return _kernels_numba, "numba"
    except ImportError:
        if choice == "numba":
            raise
        warnings.warn("numba unavailable; falling back to numpy kernels",
                      RuntimeWarning, stacklevel=2)
        from . import _kernels_numpy
        return _kernels_numpy, "numpy"


def get_kernels(name=None):
    """Return the kernel module for ``name`` (or the active backend)."""
    if name is None:
        return kernels
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    return _load(name)[0]


def active_backend():
    """Name of the backend selected at import time."""
    return _active


_choice = os.environ.get(ENV_VAR, "auto").lower()
if _choice not in _VALID:
    raise ValueError(
        f"{ENV_VAR} must be one of {_VALID}, got {_choice!r}")
kernels, _active = _load(_choice)
