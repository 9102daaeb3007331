import numpy as np
import pytest

from fkpp.eigen import principal_eigenpair, rayleigh_quotient
from fkpp.errors import NumericalError
from fkpp.fracop import frac_order
from fkpp.grid import ScalarField, make_grid
from oracles import dense_eigenpair, random_positive_trig


def cosine_medium(n=128, amp=0.5):
    g = make_grid(1, n, 1.0)
    x = g.axis_coords(0)
    return ScalarField(g, 1 + amp * np.cos(2 * np.pi * x))


@pytest.mark.parametrize("c", [1.0, 2.5])
def test_constant_medium(c):
    g = make_grid(1, 64, 1.0)
    mu = ScalarField(g, np.full(64, c))
    eig = principal_eigenpair(mu, frac_order(0.25, 1))
    assert eig.lambda1 == pytest.approx(-c, abs=1e-10)
    assert np.abs(eig.phi1.data - 1.0).max() < 1e-10


def test_cosine_matches_dense_oracle():
    mu = cosine_medium(128)
    ordr = frac_order(0.25, 1)
    eig = principal_eigenpair(mu, ordr, tol=1e-10)
    lam_ref, phi_ref = dense_eigenpair(mu, ordr)
    assert eig.lambda1 == pytest.approx(lam_ref, abs=1e-10)
    assert np.abs(eig.phi1.data - phi_ref).max() < 1e-7
    assert -1.5 < eig.lambda1 < -1.0


def test_normalization_and_positivity():
    eig = principal_eigenpair(cosine_medium(), frac_order(0.3, 1))
    assert eig.max_phi == pytest.approx(1.0)
    assert eig.min_phi > 0
    assert eig.residual <= 1e-10
    assert eig.iterations >= 1


def test_bracketing_random_media(rng):
    g = make_grid(1, 64, 1.0)
    ordr = frac_order(0.25, 1)
    for _ in range(10):
        mu = random_positive_trig(rng, g)
        eig = principal_eigenpair(mu, ordr, tol=1e-8)
        assert -mu.data.max() - 1e-7 <= eig.lambda1 <= -mu.data.min() + 1e-7


def test_monotonicity_in_mu():
    ordr = frac_order(0.25, 1)
    mu = cosine_medium()
    lam_a = principal_eigenpair(mu, ordr).lambda1
    mu_b = ScalarField(mu.grid, mu.data + 0.1)
    lam_b = principal_eigenpair(mu_b, ordr).lambda1
    assert lam_a >= lam_b


def test_shift_covariance():
    ordr = frac_order(0.25, 1)
    mu = cosine_medium()
    eig = principal_eigenpair(mu, ordr, tol=1e-11)
    shifted = principal_eigenpair(ScalarField(mu.grid, mu.data + 0.7), ordr, tol=1e-11)
    assert shifted.lambda1 == pytest.approx(eig.lambda1 - 0.7, abs=1e-9)
    assert np.abs(shifted.phi1.data - eig.phi1.data).max() < 1e-7


def test_phi_inherits_symmetry():
    # even medium about x = 0 (grid point 0): phi1(x) = phi1(-x)
    eig = principal_eigenpair(cosine_medium(), frac_order(0.25, 1))
    p = eig.phi1.data
    assert np.abs(p[1:] - p[1:][::-1]).max() < 1e-8


def test_grid_refinement_stability():
    ordr = frac_order(0.25, 1)
    lam_c = principal_eigenpair(cosine_medium(128), ordr).lambda1
    lam_f = principal_eigenpair(cosine_medium(256), ordr).lambda1
    assert abs(lam_c - lam_f) < 1e-8


def test_2d_product_cosine():
    g = make_grid(2, 64, 1.0)
    X, Y = g.coords()
    mu = ScalarField(g, (1 + 0.5 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)).reshape(-1))
    eig = principal_eigenpair(mu, frac_order(0.3, 2))
    assert -1.5 < eig.lambda1 < -1.0
    assert eig.min_phi > 0


def test_rejects_bad_inputs():
    g = make_grid(1, 64, 1.0)
    ordr = frac_order(0.25, 1)
    with pytest.raises(ValueError, match="positive"):
        principal_eigenpair(ScalarField(g, np.zeros(64)), ordr)
    with pytest.raises(ValueError, match="tol"):
        principal_eigenpair(ScalarField(g, np.ones(64)), ordr, tol=0.0)


def test_nonconvergence_reports_residual():
    with pytest.raises(NumericalError, match="converge"):
        principal_eigenpair(cosine_medium(), frac_order(0.25, 1), tol=1e-15, max_iter=2)


def test_rayleigh_at_eigenfunction():
    ordr = frac_order(0.25, 1)
    mu = cosine_medium()
    eig = principal_eigenpair(mu, ordr, tol=1e-11)
    rq = rayleigh_quotient(eig.phi1, mu, ordr)
    assert rq == pytest.approx(eig.lambda1, abs=1e-10)


def test_rayleigh_constant_case():
    g = make_grid(1, 64, 1.0)
    mu = ScalarField(g, np.ones(64))
    assert rayleigh_quotient(ScalarField(g, np.ones(64)), mu, frac_order(0.25, 1)) == -1.0


def test_rayleigh_quadratic_stationarity(rng):
    ordr = frac_order(0.25, 1)
    mu = cosine_medium()
    eig = principal_eigenpair(mu, ordr, tol=1e-12)
    pert = rng.normal(size=eig.phi1.data.size)
    pert /= np.abs(pert).max()
    errs = []
    for eps in (1e-2, 1e-3):
        phi = ScalarField(mu.grid, eig.phi1.data + eps * pert)
        errs.append(abs(rayleigh_quotient(phi, mu, ordr) - eig.lambda1))
    ratio = errs[0] / errs[1]
    assert 30 < ratio < 300  # O(eps^2) stationarity
    assert errs[0] < 1e-2


def test_rayleigh_rejects_zero_field():
    g = make_grid(1, 64, 1.0)
    mu = ScalarField(g, np.ones(64))
    with pytest.raises(ValueError):
        rayleigh_quotient(ScalarField(g, np.zeros(64)), mu, frac_order(0.25, 1))
