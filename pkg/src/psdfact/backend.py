"""Kernel backend selection.

The hot kernels in :mod:`psdfact._kernels` are written in numba-compatible
numpy and are compiled with ``numba.njit`` when the "numba" backend is
active. Setting the environment variable ``PSDFACT_BACKEND`` to ``numpy``
selects the same functions as plain Python (the fallback path); ``numba``
demands the jitted path and fails loudly if numba is missing. Unset, the
backend is numba when importable and numpy otherwise. The choice is made
once, at import time.
"""

import os

ENV_VAR = "PSDFACT_BACKEND"

_requested = os.environ.get(ENV_VAR, "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"{ENV_VAR}={_requested!r}: expected 'numba' or 'numpy'"
    )

if _requested == "numpy":
    _use_numba = False
elif _requested == "numba":
    import numba  # noqa: F401  fail here, not at first kernel call

    _use_numba = True
else:
    try:
        import numba  # noqa: F401

        _use_numba = True
    except ImportError:
        _use_numba = False

if _use_numba:
    from numba import njit

    def maybe_jit(fn):
        return njit(cache=True)(fn)

else:

    def maybe_jit(fn):
        return fn


def backend_name() -> str:
    """Return the active kernel backend, "numba" or "numpy"."""
    return "numba" if _use_numba else "numpy"


def numba_enabled() -> bool:
    return _use_numba
