"""Kernel backend registry.

The compiled extension is imported once at package import; if it is absent
(no compiler at install time) the NumPy twin is the only choice. The
default can be forced with ``VOLMOE_BACKEND=numpy`` or ``=cython``.
"""

from __future__ import annotations

import os

from ...errors import InvalidParameterError
from . import numpy_backend

_BACKENDS = {numpy_backend.NAME: numpy_backend}

try:
    from . import _cykernels

    _BACKENDS[_cykernels.NAME] = _cykernels
except ImportError:
    _cykernels = None

_ENV_VAR = "VOLMOE_BACKEND"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def default_backend_name() -> str:
    forced = os.environ.get(_ENV_VAR, "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise InvalidParameterError(
                f"{_ENV_VAR}={forced!r} but available backends are {available_backends()}"
            )
        return forced
    return "cython" if "cython" in _BACKENDS else "numpy"


def get_backend(name: str | None = None):
    """Resolve a backend module by name, or the default when name is None."""
    if name is None:
        name = default_backend_name()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None
