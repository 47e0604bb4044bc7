"""numba switch.

Set ``FILMCASIMIR_DISABLE_JIT=1`` to run the pure-numpy kernels instead of
the compiled ones (also used automatically when numba is not importable).
"""
import os

_disabled = os.environ.get("FILMCASIMIR_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError
    from numba import config as _numba_config, njit, prange
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the system TBB is too old for numba; skip probing it
        _numba_config.THREADING_LAYER = "omp"
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(func=None, **kwargs):
        if func is not None and callable(func):
            return func

        def wrapper(f):
            return f

        return wrapper

    prange = range

JIT_ENABLED = NUMBA_AVAILABLE
