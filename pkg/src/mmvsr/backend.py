"""Kernel backend selection.

The hot decoder kernels exist twice: a numba @njit build and a pure-numpy
build that performs the same floating-point operations in the same order.
The numba build is used when numba imports cleanly; setting the environment
variable MMVSR_PURE_NUMPY=1 forces the numpy build (useful on platforms
without a working JIT and for the benchmark comparison).
"""

import os

_FORCE_NUMPY = os.environ.get("MMVSR_PURE_NUMPY", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

if not _FORCE_NUMPY:
    try:
        from numba import njit as _njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via MMVSR_PURE_NUMPY
        USING_NUMBA = False
else:
    USING_NUMBA = False

if USING_NUMBA:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name():
    return "numba" if USING_NUMBA else "numpy"
