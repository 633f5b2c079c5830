"""Kernel backend selection.

``EITSIM_BACKEND=numba`` (default when numba imports) compiles the hot kernels
with ``@njit``; ``EITSIM_BACKEND=numpy`` leaves them as plain Python and routes
the vectorisable kernels through numpy.  The flag is read once at import.
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_requested = os.environ.get("EITSIM_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"EITSIM_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numba" if (_requested == "numba" and HAS_NUMBA) else "numpy"
USE_NUMBA = BACKEND == "numba"

numba_kwargs = {
    "nopython": True,
    "cache": True,
    "nogil": True,
}


def jit(func):
    """Compile ``func`` when the numba backend is active, else return it as-is."""
    if USE_NUMBA:
        return numba.jit(**numba_kwargs)(func)
    return func


def always_jit(func):
    """Compile when numba is importable, regardless of the backend flag.

    Used for the numba half of kernels that also have a numpy twin, so both
    can be compared side by side in tests and benchmarks.
    """
    if HAS_NUMBA:
        return numba.jit(**numba_kwargs)(func)
    return func
