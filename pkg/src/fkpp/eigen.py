"""Principal periodic eigenpair of (-Lap)^alpha - mu(x) I on the unit cell.

Inverse power iteration on the operator shifted by (max mu + 1), which makes
it symmetric positive definite.  Each inner solve runs conjugate gradients
with operator applications in multiplier space and a Fourier-diagonal
preconditioner, so no dense matrix is ever assembled (the dense eigensolver
lives only in the test oracle).  The eigenfunction is normalized to
max phi1 = 1; the paper-facing formulas only use phi1 through ratios, so any
positive normalization would do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .fracop import FracOrder
from .grid import ScalarField

__all__ = ["EigenPair", "principal_eigenpair", "rayleigh_quotient"]


@dataclass
class EigenPair:
    lambda1: float
    phi1: ScalarField
    residual: float
    iterations: int

    @property
    def min_phi(self) -> float:
        return float(self.phi1.data.min())

    @property
    def max_phi(self) -> float:
        return float(self.phi1.data.max())


def _cg_solve(apply_op, precond, b, x0, tol=1e-13, max_iter=500):
    x = x0.copy()
    r = b - apply_op(x)
    bscale = max(float(np.abs(b).max()), 1e-300)
    if np.abs(r).max() <= tol * bscale:
        return x
    z = precond(r)
    p = z.copy()
    rz = float((r * z).sum())
    for _ in range(max_iter):
        Ap = apply_op(p)
        alpha = rz / float((p * Ap).sum())
        x += alpha * p
        r -= alpha * Ap
        if np.abs(r).max() <= tol * bscale:
            break
        z = precond(r)
        rz_new = float((r * z).sum())
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x


def principal_eigenpair(mu: ScalarField, ord: FracOrder, tol: float = 1e-10,
                        max_iter: int = 200) -> EigenPair:
    """Smallest eigenvalue and positive eigenfunction of (-Lap)^alpha - mu."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if np.any(mu.data <= 0):
        raise ValueError("mu must be strictly positive on the cell")
    g = mu.grid
    if g.d != ord.d:
        raise ValueError("mu dimension does not match operator order")
    sym = g.symbol(2 * ord.alpha)
    mu_s = mu.shaped
    shift = float(mu.data.max()) + 1.0

    def apply_A(v):
        return np.fft.ifftn(sym * np.fft.fftn(v)).real - mu_s * v

    def apply_shifted(v):
        return apply_A(v) + shift * v

    pre = 1.0 / (sym + shift - float(mu.data.mean()))

    def precond(v):
        return np.fft.ifftn(pre * np.fft.fftn(v)).real

    v = np.ones(g.shape)
    lam = res = None
    for it in range(1, max_iter + 1):
        w = _cg_solve(apply_shifted, precond, v, v)
        w = w / np.abs(w).max()
        Aw = apply_A(w)
        lam = float((Aw * w).sum() / (w * w).sum())
        res = float(np.abs(Aw - lam * w).max())
        v = w
        if res <= tol:
            break
    else:
        raise NumericalError(
            f"eigen iteration did not converge in {max_iter} steps (residual {res:.3e})"
        )
    if v.min() <= 0:
        raise NumericalError(
            "principal eigenfunction iterate is not positive; discretization too coarse"
        )
    lo, hi = -float(mu.data.max()), -float(mu.data.min())
    if not (lo - 10 * tol <= lam <= hi + 10 * tol):
        raise NumericalError(f"lambda1={lam} escaped the bracket [{lo}, {hi}]")
    phi = ScalarField(g, (v / v.max()).reshape(-1))
    return EigenPair(lambda1=lam, phi1=phi, residual=res, iterations=it)


def rayleigh_quotient(phi: ScalarField, mu: ScalarField, ord: FracOrder) -> float:
    """<((-Lap)^alpha - mu) phi, phi> / <phi, phi> on the grid inner product."""
    nrm2 = float((phi.data * phi.data).sum())
    if nrm2 == 0.0:
        raise ValueError("rayleigh_quotient of the zero field")
    g = phi.grid
    sym = g.symbol(2 * ord.alpha)
    Aphi = np.fft.ifftn(sym * np.fft.fftn(phi.shaped)).real - mu.shaped * phi.shaped
    return float((Aphi * phi.shaped).sum() / nrm2)
