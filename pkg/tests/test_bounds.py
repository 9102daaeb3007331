import numpy as np
import pytest

from fkpp.bounds import (
    BoundParams,
    BoundProfile,
    admissible_params,
    b_of_t,
    calibrate_super,
    check_admissible,
    db_dt,
    evaluate,
    lambda_radius_sub,
    lambda_radius_super,
    residual,
    residual_summary,
    step3_sub_params,
    step3_t1_floor,
)
from fkpp.eigen import principal_eigenpair
from fkpp.fracop import frac_order, operator_tolerance
from fkpp.grid import ScalarField, make_grid

ORD = frac_order(0.25, 1)


@pytest.fixture(scope="module")
def eig_cosine():
    g = make_grid(1, 128, 1.0)
    x = g.axis_coords(0)
    mu = ScalarField(g, 1 + 0.5 * np.cos(2 * np.pi * x))
    return mu, principal_eigenpair(mu, ORD, tol=1e-11)


@pytest.fixture(scope="module")
def eig_homog():
    g = make_grid(1, 64, 1.0)
    mu = ScalarField(g, np.ones(64))
    return mu, principal_eigenpair(mu, ORD, tol=1e-11)


# ------------------------------------------------------------------ b(t)

def test_b_sub_initial_value(eig_homog):
    _, eig = eig_homog
    p = admissible_params("sub", eig, ORD, D=1.0)
    q = p.q
    want = (p.M / p.abs_l1 + p.B ** (-q)) ** (-1.0 / q)
    assert b_of_t(p, 0.0) == pytest.approx(want, rel=1e-14)


def test_b_sub_monotone_limit(eig_homog):
    _, eig = eig_homog
    p = admissible_params("sub", eig, ORD, D=1.0)
    ts = np.linspace(0, 12, 60)
    ratios = [b_of_t(p, t) * np.exp(p.abs_l1 * t) / p.B for t in ts]
    assert all(r <= 1 + 1e-12 for r in ratios)  # b <= B e^{-|l1| t}
    assert all(b >= a - 1e-14 for a, b in zip(ratios, ratios[1:]))  # increasing
    assert b_of_t(p, 60.0) * np.exp(p.abs_l1 * 60.0) == pytest.approx(p.B, rel=1e-8)


def test_b_super_band(eig_cosine):
    _, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0)
    assert b_of_t(p, p.t0) == pytest.approx(2 ** (1 / p.q) * p.B, rel=1e-12)
    for t in np.linspace(p.t0, p.t0 + 10, 40):
        b = b_of_t(p, t)
        assert p.B * np.exp(-p.abs_l1 * t) - 1e-15 <= b <= 2 ** (1 / p.q) * p.B + 1e-15
    # b_bar(t) e^{|l1| t} decreases toward B
    vals = [b_of_t(p, t) * np.exp(p.abs_l1 * t) for t in np.linspace(p.t0, p.t0 + 8, 30)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_b_super_rejects_early_times(eig_cosine):
    _, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0)
    assert p.t0 > 0
    with pytest.raises(ValueError):
        b_of_t(p, p.t0 - 0.5)


@pytest.mark.parametrize("kind", ["sub", "super"])
def test_b_solves_its_ode(eig_cosine, kind):
    # -b' + s*M b^{q+1} - |l1| b = 0 with s = +1 (sub) / -1 (super),
    # checked with centered differences of the closed form
    _, eig = eig_cosine
    p = admissible_params(kind, eig, ORD, D=1.0)
    s = 1.0 if kind == "sub" else -1.0
    dt = 1e-5
    for t in (p.t0 + 0.5, p.t0 + 2.0, p.t0 + 5.0):
        fd = (b_of_t(p, t + dt) - b_of_t(p, t - dt)) / (2 * dt)
        b = b_of_t(p, t)
        lhs = -fd + s * p.M * b ** (p.q + 1) - p.abs_l1 * b
        assert abs(lhs) <= 1e-8 * max(abs(p.abs_l1 * b), 1e-30)
        assert db_dt(p, t) == pytest.approx(fd, rel=1e-8)


# ------------------------------------------------------------------ profiles

def box_grid(n=1024, L=80.0):
    return make_grid(1, n, L, origin_centered=True)


def test_evaluate_origin_and_tail(eig_cosine):
    mu, eig = eig_cosine
    p = admissible_params("sub", eig, ORD, D=1.0)
    prof = BoundProfile(p, eig, box_grid(2048, 320.0), mu)
    f = evaluate(prof, 0.0)
    i0 = prof.grid.origin_index()
    phi0 = prof.phi_box.shaped[i0]
    assert f.shaped[i0] == pytest.approx(p.a * phi0 * p.abs_l1, rel=1e-13)
    # algebraic tail: the ratio to a*phi/(b |x|^p) approaches 1 from below
    r = prof.grid.radial().reshape(-1)
    b = b_of_t(p, 0.0)
    mid = np.argmin(np.abs(r - 40.0))
    far = np.argmax(r)
    model = p.a * prof.phi_box.data / (b * r ** p.p)
    ratio_mid = f.data[mid] / model[mid]
    ratio_far = f.data[far] / model[far]
    assert ratio_mid < ratio_far < 1.0
    assert ratio_far > 0.94


def test_evaluate_matches_scalar_recomputation(eig_cosine, rng):
    from fkpp.grid import sample_periodic

    mu, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0)
    prof = BoundProfile(p, eig, box_grid(), mu)
    t = p.t0 + 1.3
    f = evaluate(prof, t)
    idx = rng.integers(0, prof.grid.size, size=10)
    x = prof.grid.axis_coords(0)[idx]
    b = b_of_t(p, t)
    phi = sample_periodic(eig.phi1, x)
    want = p.a * phi / (1.0 / p.abs_l1 + b * np.abs(x) ** p.p)
    assert np.abs(f.data[idx] - want).max() < 1e-14 * np.abs(want).max()


def test_evaluate_positive_and_window(eig_cosine):
    mu, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0)
    prof = BoundProfile(p, eig, box_grid(), mu)
    with pytest.raises(ValueError):
        evaluate(prof, p.t0 - 0.1)
    assert (evaluate(prof, p.t0).data > 0).all()


# ------------------------------------------------------------------ residual signs

@pytest.fixture(scope="module")
def residual_setup(eig_cosine):
    mu, eig = eig_cosine
    g = box_grid(2048, 160.0)
    D = 1.01
    sub = BoundProfile(admissible_params("sub", eig, ORD, D), eig, g, mu)
    sup = BoundProfile(admissible_params("super", eig, ORD, D), eig, g, mu)
    eps = operator_tolerance(evaluate(sub, 0.0), ORD)
    return mu, eig, g, D, sub, sup, eps


def test_sub_residual_nonpositive(residual_setup):
    _, _, _, _, sub, _, eps = residual_setup
    for t in (0.0, 2.0, 6.0):
        s = residual_summary(sub, t, ORD, eps)
        assert s["viol_frac"] == 0.0
        assert s["max_viol"] <= eps


def test_super_residual_nonnegative(residual_setup):
    _, _, _, _, _, sup, eps = residual_setup
    for t in (sup.params.t0, 2.0, 6.0):
        s = residual_summary(sup, t, ORD, eps)
        assert s["viol_frac"] == 0.0


def test_sabotaged_amplitude_detection(residual_setup):
    # x10 on the sub amplitude breaks the Lemma hypothesis but measurably
    # keeps the one-sided sign (the formula ceiling is sufficient, not
    # necessary, and sits ~20x below the sign-flip threshold at these
    # margins); a x30 amplitude flips actual grid signs
    mu, eig, g, D, sub, _, eps = residual_setup
    p = sub.params
    for fac, signs_flip in ((10.0, False), (30.0, True)):
        bad = BoundParams(kind="sub", alpha=p.alpha, d=p.d, lambda1=p.lambda1,
                          a=fac * p.a, B=p.B, M=p.M, D=p.D, gamma=p.gamma, t0=0.0)
        assert check_admissible(bad, eig), "inflated amplitude must violate admissibility"
        prof = BoundProfile(bad, eig, g, mu)
        s = residual_summary(prof, 0.0, ORD, eps)
        assert (s["viol_frac"] > 0) == signs_flip


def test_admissible_params_pass_their_own_check(eig_cosine):
    _, eig = eig_cosine
    for kind in ("sub", "super"):
        p = admissible_params(kind, eig, ORD, D=1.3)
        assert check_admissible(p, eig) == []


# ------------------------------------------------------------------ parameter formulas

def test_admissible_homog_formulas(eig_homog):
    _, eig = eig_homog
    D = 0.8
    p = admissible_params("sub", eig, ORD, D)
    assert p.M == pytest.approx(2 * D, rel=1e-12)
    ceiling = (1.0 / p.M) ** ((1 + 2 * 0.25) / (2 * 0.25))
    assert p.B == pytest.approx(0.9 * ceiling, rel=1e-12)
    assert p.a == pytest.approx(0.9 * (1 - p.B ** p.q * p.M), rel=1e-12)


def test_super_t0_special_value(eig_cosine):
    _, eig = eig_cosine
    D = 1.0
    p = admissible_params("super", eig, ORD, D)  # default B hits M B^q = |l1|
    al = p.abs_l1
    assert p.t0 == pytest.approx((ORD.p / (2 * ORD.alpha * al)) * np.log(1.5), rel=1e-12)


def test_super_t0_clamped_at_zero(eig_cosine):
    _, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0, B=1e-8)
    assert p.t0 == 0.0


def test_bound_params_validation():
    with pytest.raises(ValueError):
        BoundParams(kind="mid", alpha=0.25, d=1, lambda1=-1, a=1, B=1, M=1, D=1)
    with pytest.raises(ValueError):
        BoundParams(kind="sub", alpha=0.25, d=1, lambda1=0.5, a=1, B=1, M=1, D=1)
    with pytest.raises(ValueError):
        BoundParams(kind="sub", alpha=0.25, d=1, lambda1=-1, a=-1, B=1, M=1, D=1)


def test_gamma_requirement_above_half(eig_cosine):
    _, eig = eig_cosine
    ord6 = frac_order(0.6, 1)
    p = admissible_params("sub", eig, ord6, D=1.0)
    assert p.gamma is not None and 2 * 0.6 - 1 < p.gamma < 1
    bad = BoundParams(kind="sub", alpha=0.6, d=1, lambda1=eig.lambda1, a=p.a,
                      B=p.B, M=p.M, D=p.D, gamma=None, t0=0.0)
    assert any("gamma" in msg for msg in check_admissible(bad, eig))


# ------------------------------------------------------------------ step 3

def test_step3_t1_floor_formula(eig_homog):
    _, eig = eig_homog
    D = 1.0
    t1 = step3_t1_floor(eig, ORD, D, min_uplus=1.0)
    M = 2 * D
    ceil = (1.0 / M) ** 3
    want = (8.0 / (0.9 * ceil)) ** (1.0 / 3.0)
    assert t1 == pytest.approx(max(1.0, want), rel=1e-12)


def test_step3_sub_params_mechanics(eig_homog):
    _, eig = eig_homog
    g = box_grid(2048, 160.0)
    # synthetic solution comfortably above the envelope
    u = ScalarField(g, np.full(g.size, 0.9))
    t1 = 5.0
    p, info = step3_sub_params(eig, ORD, D=1.0, u_t1=u, t1=t1)
    assert info["c"] == pytest.approx(0.99)
    assert p.B == pytest.approx(2 ** 3 / (p.abs_l1 * t1 ** 3), rel=1e-12)
    assert check_admissible(p, eig) == []
    assert info["init_excess"] <= 0
    assert info["eps"] > 0


def test_calibrate_super_dominates(eig_cosine):
    mu, eig = eig_cosine
    g = box_grid(1024, 80.0)
    u = ScalarField(g, np.full(g.size, 1.2))
    p0 = admissible_params("super", eig, ORD, D=1.0)
    ts = max(p0.t0, 1.0)
    p = calibrate_super(eig, ORD, D=1.0, u_ts=u, ts=ts)
    assert check_admissible(p, eig) == []
    prof = BoundProfile(p, eig, g, mu)
    bar = evaluate(prof, ts)
    interior = (g.radial() <= 20).reshape(-1)
    assert (bar.data[interior] >= u.data[interior]).all()


def test_lambda_radius_formulas(eig_cosine):
    _, eig = eig_cosine
    p = admissible_params("super", eig, ORD, D=1.0)
    t = p.t0 + 2.0
    lam = 0.3
    want = (p.a * eig.max_phi / (lam * b_of_t(p, t))) ** (1.0 / p.p)
    assert lambda_radius_super(p, eig, t, lam) == pytest.approx(want, rel=1e-13)
    ps = admissible_params("sub", eig, ORD, D=1.0)
    # sub envelope never reaches a level above its maximum
    assert lambda_radius_sub(ps, eig, 1.0, level=1.0) == 0.0
    low = ps.a * eig.min_phi * ps.abs_l1 / 4
    assert lambda_radius_sub(ps, eig, 1.0, level=low) > 0
