"""Kernel backend selection: numba-compiled loops or pure numpy fallbacks.

Every hot kernel in the package exists in two forms: a loop written for
``numba.njit`` and a vectorized (or plain-Python) numpy equivalent.  The
environment variable ``SKEWLAB_BACKEND`` picks the implementation:

    SKEWLAB_BACKEND=numba   force numba (ImportError if unavailable)
    SKEWLAB_BACKEND=numpy   force pure numpy/Python fallbacks
    unset / auto            numba when importable, numpy otherwise

``benchmarks/bench_backends.py`` times the two paths against each other.
"""

import os

_choice = os.environ.get("SKEWLAB_BACKEND", "auto").lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"SKEWLAB_BACKEND must be auto|numba|numpy, got {_choice!r}")

if _choice == "numpy":
    _numba = None
else:
    try:
        import numba as _numba
    except ImportError:
        if _choice == "numba":
            raise
        _numba = None

USE_NUMBA = _numba is not None


def using_numba() -> bool:
    return USE_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise.

    Usable both bare (``@maybe_njit``) and with options
    (``@maybe_njit(cache=True)``).
    """
    if args and callable(args[0]) and not kwargs:
        func = args[0]
        return _numba.njit(func) if USE_NUMBA else func

    def wrap(func):
        return _numba.njit(*args, **kwargs)(func) if USE_NUMBA else func

    return wrap
