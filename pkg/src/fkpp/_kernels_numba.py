"""Numba-compiled pairwise summation kernels.

Hot O(N^2) loops behind the principal-value quadrature and the bilinear
singular operators.  ``W`` is the offset-indexed weight table, index
``(i - j) + n - 1`` per axis.  Parallelism is over output points only; the
inner accumulation order per point is fixed, so results do not depend on the
thread count.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def diff_sum_1d(f, W):
    n = f.shape[0]
    out = np.empty(n)
    for i in prange(n):
        b = i + n - 1
        s = 0.0
        for j in range(n):
            s += (f[i] - f[j]) * W[b - j]
        out[i] = s
    return out


@njit(cache=True, parallel=True)
def bilin_sum_1d(phi, w, W):
    n = w.shape[0]
    out = np.empty(n)
    for i in prange(n):
        b = i + n - 1
        s = 0.0
        for j in range(n):
            s += (phi[i] - phi[j]) * (w[i] - w[j]) * W[b - j]
        out[i] = s
    return out


@njit(cache=True, parallel=True)
def diff_sum_2d(f, W):
    n1, n2 = f.shape
    out = np.empty((n1, n2))
    for idx in prange(n1 * n2):
        i1 = idx // n2
        i2 = idx % n2
        b1 = i1 + n1 - 1
        b2 = i2 + n2 - 1
        s = 0.0
        for j1 in range(n1):
            for j2 in range(n2):
                s += (f[i1, i2] - f[j1, j2]) * W[b1 - j1, b2 - j2]
        out[i1, i2] = s
    return out


@njit(cache=True, parallel=True)
def bilin_sum_2d(phi, w, W):
    n1, n2 = w.shape
    out = np.empty((n1, n2))
    for idx in prange(n1 * n2):
        i1 = idx // n2
        i2 = idx % n2
        b1 = i1 + n1 - 1
        b2 = i2 + n2 - 1
        s = 0.0
        for j1 in range(n1):
            for j2 in range(n2):
                s += (phi[i1, i2] - phi[j1, j2]) * (w[i1, i2] - w[j1, j2]) * W[b1 - j1, b2 - j2]
        out[i1, i2] = s
    return out


@njit(cache=True, parallel=True)
def diff_sum_3d(f, W):
    n1, n2, n3 = f.shape
    out = np.empty((n1, n2, n3))
    for idx in prange(n1 * n2 * n3):
        i1 = idx // (n2 * n3)
        r = idx % (n2 * n3)
        i2 = r // n3
        i3 = r % n3
        b1 = i1 + n1 - 1
        b2 = i2 + n2 - 1
        b3 = i3 + n3 - 1
        s = 0.0
        for j1 in range(n1):
            for j2 in range(n2):
                for j3 in range(n3):
                    s += (f[i1, i2, i3] - f[j1, j2, j3]) * W[b1 - j1, b2 - j2, b3 - j3]
        out[i1, i2, i3] = s
    return out


@njit(cache=True, parallel=True)
def bilin_sum_3d(phi, w, W):
    n1, n2, n3 = w.shape
    out = np.empty((n1, n2, n3))
    for idx in prange(n1 * n2 * n3):
        i1 = idx // (n2 * n3)
        r = idx % (n2 * n3)
        i2 = r // n3
        i3 = r % n3
        b1 = i1 + n1 - 1
        b2 = i2 + n2 - 1
        b3 = i3 + n3 - 1
        s = 0.0
        for j1 in range(n1):
            for j2 in range(n2):
                for j3 in range(n3):
                    s += ((phi[i1, i2, i3] - phi[j1, j2, j3])
                          * (w[i1, i2, i3] - w[j1, j2, j3])
                          * W[b1 - j1, b2 - j2, b3 - j3])
        out[i1, i2, i3] = s
    return out
