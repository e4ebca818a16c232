"""numba detection and backend selection.

The backend is read from ``QMET_BACKEND`` (``numba`` or ``numpy``) at import
time; numba is the default whenever it imports.  :func:`set_backend` switches
at runtime (tests and the benchmark use it).
"""

from __future__ import annotations

import os

ENV_VAR = "QMET_BACKEND"

try:
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    HAVE_NUMBA = False


def njit(fn):
    if HAVE_NUMBA:
        return _numba.njit(cache=True, nogil=True)(fn)
    return fn


def _initial_backend() -> str:
    wanted = os.environ.get(ENV_VAR, "numba").strip().lower()
    if wanted not in ("numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba" and not HAVE_NUMBA:
        return "numpy"
    return wanted


_backend = _initial_backend()


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev
