"""Explicit sub- and supersolutions of the algebraic-profile family.

The trapping functions have the form

    u(x,t) = a * phi1(x) / (|lambda1|^{-1} + b(t) |x|^{d+2a}),

where b(t) solves -b' + M b^{q+1} - |lambda1| b = 0 (q = 2a/(d+2a)) in closed
form, with +M for the subsolution and -M for the supersolution.  The constant
M = D ((min phi1)^{-1} + 1) comes from the measured profile-family bound D
(see ``fracop.estimate_D``); the admissibility inequalities on (a, B) then
guarantee the one-sided evolution residual sign, which ``residual`` checks
directly on the grid.

Validity windows: the subsolution works for t >= 0, the supersolution from

    t0 = (d+2a) (2a |lambda1|)^{-1} ln(1/2 + M |lambda1|^{-1} B^q),

clamped at 0 (the property holding earlier is only stronger).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import EigenPair
from .fracop import FracOrder, apply_multiplier, default_gamma
from .grid import PeriodicGrid, ScalarField, tile_to_box

__all__ = [
    "BoundParams",
    "BoundProfile",
    "b_of_t",
    "db_dt",
    "evaluate",
    "residual",
    "residual_summary",
    "check_admissible",
    "admissible_params",
    "step3_t1_floor",
    "step3_sub_params",
    "calibrate_super",
    "lambda_radius_super",
    "lambda_radius_sub",
]

KINDS = ("sub", "super")


@dataclass
class BoundParams:
    kind: str
    alpha: float
    d: int
    lambda1: float
    a: float
    B: float
    M: float
    D: float
    gamma: float | None = None
    t0: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.lambda1 >= 0:
            raise ValueError("bound profiles require lambda1 < 0")
        for name in ("a", "B", "M", "D"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def p(self) -> float:
        return self.d + 2 * self.alpha

    @property
    def q(self) -> float:
        return 2 * self.alpha / self.p

    @property
    def abs_l1(self) -> float:
        return abs(self.lambda1)


def b_of_t(params: BoundParams, t: float) -> float:
    """Closed-form b(t); +M inside for sub, -M for super (valid t >= t0)."""
    q, al = params.q, params.abs_l1
    if params.kind == "super" and t < params.t0 - 1e-12:
        raise ValueError(f"supersolution b(t) is only valid for t >= t0 = {params.t0}")
    if params.kind == "sub" and t < 0:
        raise ValueError("subsolution b(t) is only valid for t >= 0")
    sign = 1.0 if params.kind == "sub" else -1.0
    inner = sign * params.M / al + params.B ** (-q) * np.exp(q * al * t)
    if inner <= 0:
        raise ValueError("b(t) inner expression is non-positive; t below validity window")
    return float(inner ** (-1.0 / q))


def db_dt(params: BoundParams, t: float) -> float:
    """Closed-form derivative b'(t) (differentiates b_of_t exactly)."""
    q, al = params.q, params.abs_l1
    sign = 1.0 if params.kind == "sub" else -1.0
    grow = params.B ** (-q) * np.exp(q * al * t)
    inner = sign * params.M / al + grow
    if inner <= 0:
        raise ValueError("b(t) inner expression is non-positive; t below validity window")
    return float(-al * grow * inner ** (-1.0 / q - 1.0))


@dataclass
class BoundProfile:
    """A bound family bound to an eigenpair and an evaluation box."""

    params: BoundParams
    eigen: EigenPair
    grid: PeriodicGrid
    mu_cell: ScalarField
    phi_box: ScalarField = field(init=False, repr=False)
    mu_box: ScalarField = field(init=False, repr=False)

    def __post_init__(self):
        self.phi_box = tile_to_box(self.eigen.phi1, self.grid)
        self.mu_box = tile_to_box(self.mu_cell, self.grid)


def evaluate(profile: BoundProfile, t: float) -> ScalarField:
    """Pointwise a * phi1(x) / (|l1|^{-1} + b(t) |x|^{d+2a}) on the box."""
    pr = profile.params
    b = b_of_t(pr, t)
    r = profile.grid.radial()
    den = 1.0 / pr.abs_l1 + b * r ** pr.p
    vals = pr.a * profile.phi_box.shaped / den
    out = ScalarField(profile.grid, vals.reshape(-1))
    if np.any(out.data <= 0):
        raise ValueError("bound profile must evaluate strictly positive")
    return out


def residual(profile: BoundProfile, t: float, ord: FracOrder) -> ScalarField:
    """Evolution residual N[u~] = u~_t + (-Lap)^a u~ - mu u~ + u~^2.

    The time derivative is analytic (via b'(t)); the operator uses the
    multiplier realization, whose discretization error is covered by the
    quadrature tolerance supplied to the sign checks.
    """
    pr = profile.params
    b = b_of_t(pr, t)
    bp = db_dt(pr, t)
    r = profile.grid.radial()
    den = 1.0 / pr.abs_l1 + b * r ** pr.p
    phi = profile.phi_box.shaped
    ut = -pr.a * phi * bp * r ** pr.p / den ** 2
    uu = ScalarField(profile.grid, (pr.a * phi / den).reshape(-1))
    Au = apply_multiplier(uu, ord)
    N = ut + Au.shaped - profile.mu_box.shaped * uu.shaped + uu.shaped ** 2
    return ScalarField(profile.grid, N.reshape(-1))


def residual_summary(profile: BoundProfile, t: float, ord: FracOrder,
                     eps_grid: float) -> dict:
    """Interior sign-violation summary for one time slice.

    Sub profiles must keep N <= +eps_grid, super profiles N >= -eps_grid, on
    the sub-box |x| <= min(L)/4 (the outer band is polluted by quadrature
    truncation).
    """
    N = residual(profile, t, ord).shaped
    mask = profile.grid.radial() <= min(profile.grid.L) / 4
    vals = N[mask]
    if profile.params.kind == "sub":
        viol = vals > eps_grid
        worst = float(vals.max())
    else:
        viol = vals < -eps_grid
        worst = float(-vals.min())
    return {
        "kind": profile.params.kind,
        "t": float(t),
        "viol_frac": float(np.mean(viol)),
        "max_viol": worst,
        "eps_grid": float(eps_grid),
    }


def _m_of(D: float, eigen: EigenPair) -> float:
    return D * (1.0 / eigen.min_phi + 1.0)


def check_admissible(params: BoundParams, eigen: EigenPair) -> list[str]:
    """Return the list of violated Lemma hypotheses (empty when admissible)."""
    problems = []
    q, al = params.q, params.abs_l1
    M_expected = _m_of(params.D, eigen)
    if abs(params.M - M_expected) > 1e-9 * M_expected:
        problems.append(f"M={params.M} differs from D((min phi)^-1 + 1)={M_expected}")
    if params.alpha >= 0.5:
        if params.gamma is None or not (2 * params.alpha - 1 < params.gamma < 1):
            problems.append("alpha >= 1/2 requires gamma in (2*alpha - 1, 1)")
    if params.kind == "sub":
        B_ceil = (al / params.M) ** (1.0 / q)
        if not params.B < B_ceil:
            problems.append(f"B={params.B} is not below its ceiling {B_ceil}")
        a_ceil = (1.0 / eigen.max_phi) * (1.0 - params.B ** q * params.M / al)
        if a_ceil <= 0 or not params.a <= a_ceil:
            problems.append(f"a={params.a} exceeds its ceiling {a_ceil}")
        if params.t0 != 0.0:
            problems.append("subsolution profiles start at t0 = 0")
    else:
        a_floor = (1.0 / eigen.min_phi) * (1.0 + 2.0 * params.B ** q * params.M / al)
        if not params.a >= a_floor:
            problems.append(f"a={params.a} is below its floor {a_floor}")
        t0_expected = max(0.0, (params.p / (2 * params.alpha * al))
                          * np.log(0.5 + params.M / al * params.B ** q))
        if abs(params.t0 - t0_expected) > 1e-9 * max(1.0, t0_expected):
            problems.append(f"t0={params.t0} differs from its formula value {t0_expected}")
    return problems


def admissible_params(kind: str, eigen: EigenPair, ord: FracOrder, D: float,
                      B: float | None = None, margin: float = 0.1,
                      gamma: float | None = None) -> BoundParams:
    """Parameters saturating the Lemma constraints with the given margin.

    Sub: B at (1-margin) of its ceiling (unless given) and a at (1-margin) of
    the ceiling that B implies.  Super: B defaults to the sub ceiling scale,
    a sits at (1+margin) of its floor, t0 from its formula clamped at 0.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if D <= 0:
        raise ValueError("D must be positive")
    al = abs(eigen.lambda1)
    if eigen.lambda1 >= 0:
        raise ValueError("admissible_params requires lambda1 < 0")
    M = _m_of(D, eigen)
    p = ord.p
    q = 2 * ord.alpha / p
    if ord.alpha >= 0.5 and gamma is None:
        gamma = default_gamma(ord.alpha)
    B_ceil = (al / M) ** (1.0 / q)
    if not B_ceil > 0:
        raise ValueError("empty admissible range for B")
    if kind == "sub":
        Bv = (1.0 - margin) * B_ceil if B is None else float(B)
        if not Bv < B_ceil:
            raise ValueError(f"B={Bv} must stay below the ceiling {B_ceil}")
        a_ceil = (1.0 / eigen.max_phi) * (1.0 - Bv ** q * M / al)
        a = (1.0 - margin) * a_ceil
        t0 = 0.0
    else:
        Bv = B_ceil if B is None else float(B)
        a_floor = (1.0 / eigen.min_phi) * (1.0 + 2.0 * Bv ** q * M / al)
        a = (1.0 + margin) * a_floor
        t0 = max(0.0, (p / (2 * ord.alpha * al)) * np.log(0.5 + M / al * Bv ** q))
    return BoundParams(kind=kind, alpha=ord.alpha, d=ord.d, lambda1=eigen.lambda1,
                       a=a, B=Bv, M=M, D=D, gamma=gamma, t0=t0)


def step3_t1_floor(eigen: EigenPair, ord: FracOrder, D: float, min_uplus: float,
                   margin: float = 0.1) -> float:
    """Smallest t1 compatible with the compact-convergence and B-ceiling needs."""
    al = abs(eigen.lambda1)
    M = _m_of(D, eigen)
    q = 2 * ord.alpha / ord.p
    B_ceil = (al / M) ** (1.0 / q)
    t_compact = min_uplus ** (-2 * ord.alpha / ord.d)
    t_ceiling = (2 ** (1.0 / q) / ((1.0 - margin) * B_ceil * al)) ** (1.0 / (ord.d / (2 * ord.alpha) + 1.0))
    return float(max(t_compact, t_ceiling))


def step3_sub_params(eigen: EigenPair, ord: FracOrder, D: float,
                     u_t1: ScalarField, t1: float, margin: float = 0.1,
                     gamma: float | None = None):
    """Subsolution constants from the measured level of the solution at t1.

    Measures the largest c in (0,1) with u(x,t1) >= c t1 / (t1^{d/2a+1} + |x|^p)
    on the interior ring 1 <= |x| <= min(L)/4, then applies the closed forms

        a = c / (2 t1^{d/2a} |l1| max phi),   B = 2^{(d+2a)/2a} / (|l1| t1^{d/2a+1}),

    capping a at (1-margin) of its admissibility ceiling if needed.  Returns
    (params, info) where info carries c, the epsilon level the profile
    guarantees, and the worst initial-ordering excess on the interior.
    """
    al = abs(eigen.lambda1)
    M = _m_of(D, eigen)
    p, q = ord.p, 2 * ord.alpha / ord.p
    dexp = ord.d / (2 * ord.alpha)
    g = u_t1.grid
    r = g.radial()
    ring = (r >= 1.0) & (r <= min(g.L) / 4)
    if not np.any(ring):
        raise ValueError("grid has no points in the measurement ring 1 <= |x| <= L/4")
    uvals = u_t1.shaped[ring]
    c = float(np.min(uvals * (t1 ** (dexp + 1.0) + r[ring] ** p) / t1))
    c = min(c, 0.99)
    if c <= 0:
        raise ValueError(f"no positive envelope constant at t1={t1}; t1 too early")
    B = 2 ** (1.0 / q) / (al * t1 ** (dexp + 1.0))
    B_ceil = (al / M) ** (1.0 / q)
    if not B < B_ceil:
        raise ValueError(f"step-3 B={B} violates its ceiling {B_ceil}; increase t1")
    a = c / (2.0 * t1 ** dexp * al * eigen.max_phi)
    a_ceil = (1.0 / eigen.max_phi) * (1.0 - B ** q * M / al)
    capped = False
    if a > (1.0 - margin) * a_ceil:
        a = (1.0 - margin) * a_ceil
        capped = True
    if ord.alpha >= 0.5 and gamma is None:
        gamma = default_gamma(ord.alpha)
    params = BoundParams(kind="sub", alpha=ord.alpha, d=ord.d, lambda1=eigen.lambda1,
                         a=a, B=B, M=M, D=D, gamma=gamma, t0=0.0)
    # initial ordering u_sub(., 0) <= u(., t1) on the interior
    b0 = b_of_t(params, 0.0)
    phi_vals = tile_to_box(eigen.phi1, g).shaped if eigen.phi1.grid != g else eigen.phi1.shaped
    usub0 = a * phi_vals / (1.0 / al + b0 * r ** p)
    interior = r <= min(g.L) / 4
    excess = float(np.max((usub0 - u_t1.shaped)[interior]))
    eps = c * eigen.min_phi / (4.0 * t1 ** dexp * eigen.max_phi)
    info = {"c": c, "eps": eps, "t1": float(t1), "a_capped": capped,
            "init_excess": excess}
    return params, info


def calibrate_super(eigen: EigenPair, ord: FracOrder, D: float, u_ts: ScalarField,
                    ts: float, B: float | None = None, margin: float = 0.1,
                    safety: float = 1.05, gamma: float | None = None) -> BoundParams:
    """Supersolution with amplitude raised until it dominates u at time ts.

    The Lemma floor for a is one-sided, so raising a keeps admissibility; the
    measured requirement is sup_x u(x,ts) (|l1|^{-1} + b(ts)|x|^p) / phi1(x)
    over the interior.
    """
    params = admissible_params("super", eigen, ord, D, B=B, margin=margin, gamma=gamma)
    if ts < params.t0:
        raise ValueError(f"calibration time {ts} is before the validity start {params.t0}")
    g = u_ts.grid
    r = g.radial()
    phi_vals = tile_to_box(eigen.phi1, g).shaped
    den = 1.0 / params.abs_l1 + b_of_t(params, ts) * r ** params.p
    interior = r <= min(g.L) / 4
    need = float(np.max((u_ts.shaped * den / phi_vals)[interior]))
    if safety * need > params.a:
        params.a = safety * need
    return params


def lambda_radius_super(params: BoundParams, eigen: EigenPair, t: float,
                        level: float) -> float:
    """Outer radius bound ((a max phi) / (level b(t)))^{1/(d+2a)}."""
    return float((params.a * eigen.max_phi / (level * b_of_t(params, t))) ** (1.0 / params.p))


def lambda_radius_sub(params: BoundParams, eigen: EigenPair, t: float,
                      level: float) -> float:
    """Radius of the level set of the conservative envelope a min(phi)/den; 0 if unreached."""
    val = (params.a * eigen.min_phi / level - 1.0 / params.abs_l1) / b_of_t(params, t)
    if val <= 0:
        return 0.0
    return float(val ** (1.0 / params.p))
