"""Optional numba acceleration.

Set ``VECSEG_DISABLE_JIT=1`` to force the pure-numpy kernels even when numba
is importable.
"""

import os

_disabled = os.environ.get("VECSEG_DISABLE_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _disabled


def njit(fn):
    """Compile ``fn`` with numba in nopython mode, or return it untouched."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
