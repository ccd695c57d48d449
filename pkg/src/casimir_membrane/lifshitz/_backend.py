"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the NumPy
implementation is used. Set CASIMIR_MEMBRANE_BACKEND=numpy|compiled to force
a choice (the benchmark and parity tests rely on importing both modules
directly, this switch is for whole-process pinning).
"""
from __future__ import annotations

import os

_forced = os.environ.get("CASIMIR_MEMBRANE_BACKEND", "").strip().lower()

if _forced == "numpy":
    from . import _kernels_py as _impl

    BACKEND = "numpy"
elif _forced == "compiled":
    from . import _kernels_cy as _impl  # type: ignore[no-redef]

    BACKEND = "compiled"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "numpy"

xi_block_integrals = _impl.xi_block_integrals


def backend_name() -> str:
    """Which kernel implementation this process is using."""
    return BACKEND
