"""Independent reference computations used to freeze expected test values."""

import numpy as np
from scipy.linalg import eigh

from fkpp.fracop import FracOrder
from fkpp.grid import ScalarField


def dense_operator(mu: ScalarField, ord: FracOrder) -> np.ndarray:
    """Assemble (-Lap)^alpha - diag(mu) column by column via the multiplier."""
    g = mu.grid
    n = g.size
    sym = g.symbol(2 * ord.alpha)
    A = np.empty((n, n))
    for j in range(n):
        e = np.zeros(g.shape)
        e.reshape(-1)[j] = 1.0
        A[:, j] = np.fft.ifftn(sym * np.fft.fftn(e)).real.reshape(-1)
    A -= np.diag(mu.data)
    return A


def dense_eigenpair(mu: ScalarField, ord: FracOrder):
    """Full symmetric eigensolve; returns (lambda1, phi1 normalized to max 1)."""
    A = dense_operator(mu, ord)
    w, V = eigh(A)
    phi = V[:, 0]
    if phi.sum() < 0:
        phi = -phi
    return float(w[0]), phi / phi.max()


def logistic_exact(u0: float, mu: float, t: float) -> float:
    """u' = mu u - u^2 from u(0) = u0."""
    return mu / (1.0 + (mu / u0 - 1.0) * np.exp(-mu * t))


def random_positive_trig(rng, grid, n_modes=3, base=1.0, rough=0.4):
    """Random trigonometric medium kept strictly positive."""
    xs = grid.coords()
    vals = np.zeros(grid.shape)
    for _ in range(n_modes):
        amp = rng.uniform(-rough, rough, size=grid.d)
        k = rng.integers(1, 4, size=grid.d)
        ph = rng.uniform(0, 2 * np.pi, size=grid.d)
        term = np.ones(grid.shape)
        for a, x in enumerate(xs):
            term = term * np.cos(2 * np.pi * k[a] * x / grid.L[a] + ph[a])
        vals += amp[0] * term
    vals = base + vals
    lift = min(0.0, vals.min() - 0.1)
    return ScalarField(grid, (vals - lift).reshape(-1))
