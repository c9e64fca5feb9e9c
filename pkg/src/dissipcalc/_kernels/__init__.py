"""Kernel backend selection.

The package ships two interchangeable kernel implementations:

* ``_core`` -- Cython extension, compiled at install time (hot path);
* ``_fallback`` -- pure numpy, always available.

The compiled core is preferred when importable.  Set the environment
variable ``DISSIPCALC_BACKEND`` to ``compiled`` or ``python`` to force a
choice (``compiled`` raises if the extension is missing).
"""

from __future__ import annotations

import os
from types import ModuleType

from dissipcalc._kernels import _fallback


def _load_compiled():
    from dissipcalc._kernels import _core  # noqa: PLC0415

    return _core


_requested = os.environ.get("DISSIPCALC_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    try:
        _impl = _load_compiled()
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"
elif _requested in ("compiled", "c", "cython"):
    _impl = _load_compiled()
    BACKEND = "compiled"
elif _requested in ("python", "py", "fallback", "numpy"):
    _impl = _fallback
    BACKEND = "python"
else:
    raise ValueError(
        f"DISSIPCALC_BACKEND={_requested!r}: expected 'auto', 'compiled' or 'python'"
    )

matmul = _impl.matmul
lu_solve = _impl.lu_solve
expm = _impl.expm
power_opnorm = _impl.power_opnorm
hermitian_eig = _impl.hermitian_eig
cholesky_psd = _impl.cholesky_psd


def get_backend(name: str) -> ModuleType:
    """Return a backend module by name; used by benchmarks and tests."""
    if name == "python":
        return _fallback
    if name == "compiled":
        return _load_compiled()
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    try:
        _load_compiled()
    except ImportError:
        return ("python",)
    return ("compiled", "python")
