"""Backend dispatch for the hot pairwise-summation kernels.

The quadrature operators reduce to lattice sums with weights that depend only
on the index offset, so both backends consume one precomputed weight table per
operator call.  The numba backend is the default; set ``FKPP_NO_NUMBA=1`` to
force the pure-numpy path (same math, different roundoff order).
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "FKPP_NO_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


if _numba_disabled():
    from . import _kernels_numpy as _impl

    USING_NUMBA = False
else:
    try:
        from . import _kernels_numba as _impl

        USING_NUMBA = True
    except ImportError:
        from . import _kernels_numpy as _impl

        USING_NUMBA = False


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def set_num_threads(n: int) -> None:
    """Request n threads for parallel kernel loops (numba backend only)."""
    if USING_NUMBA and n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def pairwise_diff_sum(f: np.ndarray, W: np.ndarray) -> np.ndarray:
    """out[i] = sum_j (f[i] - f[j]) * W[i - j]  (offset-indexed table W)."""
    f = np.ascontiguousarray(f, dtype=float)
    if f.ndim == 1:
        return _impl.diff_sum_1d(f, W)
    if f.ndim == 2:
        return _impl.diff_sum_2d(f, W)
    if f.ndim == 3:
        return _impl.diff_sum_3d(f, W)
    raise ValueError(f"unsupported dimension {f.ndim}")


def pairwise_bilinear_sum(phi: np.ndarray, w: np.ndarray, W: np.ndarray) -> np.ndarray:
    """out[i] = sum_j (phi[i] - phi[j]) (w[i] - w[j]) W[i - j]."""
    phi = np.ascontiguousarray(phi, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    if phi.shape != w.shape:
        raise ValueError("phi and w must share a shape")
    if w.ndim == 1:
        return _impl.bilin_sum_1d(phi, w, W)
    if w.ndim == 2:
        return _impl.bilin_sum_2d(phi, w, W)
    if w.ndim == 3:
        return _impl.bilin_sum_3d(phi, w, W)
    raise ValueError(f"unsupported dimension {w.ndim}")
