"""Hot numerical kernels with interchangeable backends.

Two implementations share one calling convention:

* ``numba`` -- scalar loops compiled with ``@njit`` (default when numba imports)
* ``numpy`` -- the same algorithms written with vectorised numpy inner sums

Set ``KOON_GPHCS_BACKEND=numpy`` (or ``numba``) before import to choose;
:func:`set_backend` switches at runtime. Both backends consume random numbers
drawn by the caller, so a given seed yields the same chain on either one.
"""

import os

from . import numpy_impl

try:
    from . import numba_impl
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba_impl = None

ENV_VAR = "KOON_GPHCS_BACKEND"
_BACKENDS = {"numpy": numpy_impl}
if numba_impl is not None:
    _BACKENDS["numba"] = numba_impl


def available():
    return sorted(_BACKENDS)


def get(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable kernel backend {name!r}; choose from {available()}"
        ) from None


def _initial():
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested:
        return get(requested)
    return _BACKENDS.get("numba", numpy_impl)


_active = _initial()


def active():
    """Return the module implementing the current backend."""
    return _active


def set_backend(name):
    global _active
    _active = get(name)
    return _active.NAME


def backend_name():
    return _active.NAME
