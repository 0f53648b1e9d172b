"""Backend dispatch for the hot numeric kernels.

Two interchangeable implementations live side by side: a numba @njit one
and a pure-numpy one. Selection happens once at import time through the
LNOPT_BACKEND environment variable:

  LNOPT_BACKEND=numba   require numba (ImportError if missing)
  LNOPT_BACKEND=numpy   force the pure-numpy fallback
  unset / auto          numba when importable, numpy otherwise

Both backends compute the same quantities; given one backend, results are
deterministic. See benchmarks/bench_backends.py for a speed comparison.
"""

import os

_ENV_VAR = "LNOPT_BACKEND"


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be one of 'auto', 'numba', 'numpy' (got {choice!r})"
        )
    if choice == "numpy":
        from . import numpy_impl as impl

        return impl, "numpy"
    try:
        from . import numba_impl as impl

        return impl, "numba"
    except ImportError:
        if choice == "numba":
            raise
        from . import numpy_impl as impl

        return impl, "numpy"


_impl, BACKEND = _select()

onemax_loss = _impl.onemax_loss
leadingones_loss = _impl.leadingones_loss
ising_ring_loss = _impl.ising_ring_loss
sphere_loss = _impl.sphere_loss
illcond_loss = _impl.illcond_loss
multimodal_loss = _impl.multimodal_loss
path_loss = _impl.path_loss
clamp_add = _impl.clamp_add
gray_pool = _impl.gray_pool
neighborhood_mean_1d = _impl.neighborhood_mean_1d
neighborhood_mean_2d = _impl.neighborhood_mean_2d


def backend_name() -> str:
    return BACKEND
