"""Kernel backend selection: compiled extension with a pure-numpy fallback.

The compiled module is chosen at import when available; set the environment
variable ``CNROPT_PURE_PYTHON=1`` (before import) or call :func:`set_backend`
to force the fallback. Call sites access kernels through ``backend.kernels``
so a swap takes effect immediately.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; fallback only
    _compiled = None

_FORCE_PURE = os.environ.get("CNROPT_PURE_PYTHON", "") not in ("", "0")

kernels = _kernels_py if (_compiled is None or _FORCE_PURE) else _compiled


def backend_name() -> str:
    return "pure-python" if kernels is _kernels_py else "compiled"


def available_backends() -> dict:
    out = {"pure-python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def set_backend(name: str) -> None:
    """Select the active kernel set; mainly for tests and benchmarks."""
    global kernels
    try:
        kernels = available_backends()[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None
