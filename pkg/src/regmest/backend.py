"""Numba/numpy backend selection for the hot kernels.

Set the environment variable ``REGMEST_NO_NUMBA=1`` before import to force the
pure-numpy code paths (useful for debugging and for benchmarking the JIT
speedup; see benchmarks/bench_kernels.py).
"""

import os

ENV_FLAG = "REGMEST_NO_NUMBA"


def numba_requested() -> bool:
    """True unless the env flag disables numba."""
    return os.environ.get(ENV_FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}


NUMBA_AVAILABLE = False
if numba_requested():
    try:
        import numba  # noqa: F401

        NUMBA_AVAILABLE = True
    except ImportError:
        NUMBA_AVAILABLE = False

#: True when the jitted kernels are active in this process.
NUMBA_ENABLED = NUMBA_AVAILABLE
