"""Kernel backend selection.

Hot numerical kernels are written once (numpy-compatible subset) and compiled
with numba when it is importable. Setting the environment variable
``GPROT_NUMBA=0`` (also ``false``/``off``/``no``) before import selects the
pure-numpy fallback even when numba is installed; benchmarks import both
variants directly, so the compiled path stays reachable regardless of the
flag as long as numba imports.
"""

import os

_flag = os.environ.get("GPROT_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "off", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and NUMBA_REQUESTED


def jit(func):
    """Compile func with numba if available; compilation itself is lazy."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
