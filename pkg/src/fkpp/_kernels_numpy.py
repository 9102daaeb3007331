"""Pure-numpy pairwise summation kernels.

Same contract as the numba backend: ``W`` is the offset-indexed weight table
(volume element and distance cutoffs baked in), indexed by lattice offset
``(i - j) + n - 1`` per axis.  Summation uses per-target contiguous views, so
each target's accumulation order is fixed.
"""

import numpy as np


def _window_sums_1d(W, n):
    cs = np.concatenate(([0.0], np.cumsum(W)))
    i = np.arange(n)
    return cs[i + n] - cs[i]


def diff_sum_1d(f, W):
    n = f.shape[0]
    S = _window_sums_1d(W, n)
    out = np.empty(n)
    for i in range(n):
        row = W[i:i + n][::-1]
        out[i] = f[i] * S[i] - row @ f
    return out


def bilin_sum_1d(phi, w, W):
    n = w.shape[0]
    out = np.empty(n)
    pw = phi * w
    for i in range(n):
        row = W[i:i + n][::-1]
        out[i] = (phi[i] * w[i] * row.sum() - phi[i] * (row @ w)
                  - w[i] * (row @ phi) + row @ pw)
    return out


def diff_sum_2d(f, W):
    n1, n2 = f.shape
    out = np.empty((n1, n2))
    for i1 in range(n1):
        Wv = W[i1:i1 + n1][::-1]
        for i2 in range(n2):
            row = Wv[:, i2:i2 + n2][:, ::-1]
            out[i1, i2] = f[i1, i2] * row.sum() - np.sum(row * f)
    return out


def bilin_sum_2d(phi, w, W):
    n1, n2 = w.shape
    out = np.empty((n1, n2))
    pw = phi * w
    for i1 in range(n1):
        Wv = W[i1:i1 + n1][::-1]
        for i2 in range(n2):
            row = Wv[:, i2:i2 + n2][:, ::-1]
            out[i1, i2] = (phi[i1, i2] * w[i1, i2] * row.sum()
                           - phi[i1, i2] * np.sum(row * w)
                           - w[i1, i2] * np.sum(row * phi)
                           + np.sum(row * pw))
    return out


def diff_sum_3d(f, W):
    n1, n2, n3 = f.shape
    out = np.empty((n1, n2, n3))
    for i1 in range(n1):
        W1 = W[i1:i1 + n1][::-1]
        for i2 in range(n2):
            W12 = W1[:, i2:i2 + n2][:, ::-1]
            for i3 in range(n3):
                row = W12[:, :, i3:i3 + n3][:, :, ::-1]
                out[i1, i2, i3] = f[i1, i2, i3] * row.sum() - np.sum(row * f)
    return out


def bilin_sum_3d(phi, w, W):
    n1, n2, n3 = w.shape
    out = np.empty((n1, n2, n3))
    pw = phi * w
    for i1 in range(n1):
        W1 = W[i1:i1 + n1][::-1]
        for i2 in range(n2):
            W12 = W1[:, i2:i2 + n2][:, ::-1]
            for i3 in range(n3):
                row = W12[:, :, i3:i3 + n3][:, :, ::-1]
                out[i1, i2, i3] = (phi[i1, i2, i3] * w[i1, i2, i3] * row.sum()
                                   - phi[i1, i2, i3] * np.sum(row * w)
                                   - w[i1, i2, i3] * np.sum(row * phi)
                                   + np.sum(row * pw))
    return out
