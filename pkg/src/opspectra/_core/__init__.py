"""Exact matrix kernel with backend selection at import.

The compiled Cython backend is preferred; the pure-Python twin is the
fallback.  Set OPSPECTRA_PURE=1 to force the pure backend (used by the
benchmark and the backend-equivalence tests).
"""

import os

from . import kernel_py

if os.environ.get("OPSPECTRA_PURE"):
    kernel = kernel_py
else:
    try:
        from . import kernel_cy as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = kernel_py

BACKEND = kernel.BACKEND


def available_backends():
    """Return the importable kernel modules, pure backend always last."""
    out = []
    try:
        from . import kernel_cy

        out.append(kernel_cy)
    except ImportError:
        pass
    out.append(kernel_py)
    return out
