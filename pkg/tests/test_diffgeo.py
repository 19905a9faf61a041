import numpy as np
import pytest

from cknlab.diffgeo import (MetricJet, conformal_change_residuals, fd_gradient, fd_hessian,
                            hs_norm_sq, steps, sym_matrix, sym_product)
from cknlab.fields import random_metric, trig_poly

from cknlab.verify import stereographic_ricci_residual as stereo_ricci


def test_linear_and_quadratic_exact():
    y = np.array([[0.3, -1.2, 2.0], [1.0, 1.0, 1.0]])
    a = np.array([1.5, -2.0, 0.5])
    np.testing.assert_allclose(fd_gradient(lambda z: z @ a, y), np.broadcast_to(a, y.shape), atol=1e-10)
    q = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, -1.0], [0.0, -1.0, 3.0]])
    f = lambda z: 0.5 * np.einsum("...i,ij,...j->...", z, q, z)  # noqa: E731
    np.testing.assert_allclose(fd_hessian(f, y), np.broadcast_to(q, (2, 3, 3)), atol=1e-8)


def test_steps_scale_with_coordinates():
    h = steps(np.array([0.0, 10.0]), 1e-3)
    assert h[0] == pytest.approx(1e-3)
    assert h[1] == pytest.approx(1e-2)


def test_trig_poly_oracle():
    f = trig_poly(3, 0, seed=5)
    rng = np.random.default_rng(1)
    y = rng.uniform(-2, 2, (30, 3))
    np.testing.assert_allclose(fd_gradient(f, y), f.grad(y), atol=1e-7)
    np.testing.assert_allclose(fd_hessian(f, y), f.hess(y), atol=1e-7)


def test_flat_metric_curvature_vanishes():
    flat = lambda z: np.broadcast_to(np.eye(3), np.shape(z)[:-1] + (3, 3)).copy()  # noqa: E731
    jet = MetricJet(flat, np.random.default_rng(0).normal(size=(5, 3)))
    np.testing.assert_allclose(jet.ricci(), 0, atol=1e-9)
    np.testing.assert_allclose(jet.christoffel(), 0, atol=1e-9)


def test_round_sphere_polar_metric():
    # S^2 in (θ, φ): g = diag(1, sin²θ); Ric = g, scalar curvature 2
    def metric(z):
        th = np.asarray(z)[..., 0]
        out = np.zeros(np.shape(z)[:-1] + (2, 2))
        out[..., 0, 0] = 1
        out[..., 1, 1] = np.sin(th) ** 2
        return out

    y = np.array([[0.7, 0.2], [1.3, 2.0], [2.2, -1.0]])
    jet = MetricJet(metric, y)
    np.testing.assert_allclose(jet.ricci(), metric(y), atol=1e-7)
    np.testing.assert_allclose(jet.scalar_curvature(), 2, atol=1e-7)


def test_sym_helpers():
    m = np.array([[1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_allclose(sym_matrix(m), [[1, 1], [1, 3]])
    u, v = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    np.testing.assert_allclose(sym_product(u, v), [[0, 1], [1, 0]])
    assert hs_norm_sq(np.eye(2), np.eye(2) * 2) == pytest.approx(8)


def _flat(d):
    return lambda z: np.broadcast_to(np.eye(d), np.shape(z)[:-1] + (d, d)).copy()


def test_conformal_formulas_trivial_tau():
    d = 3
    y = np.random.default_rng(2).uniform(-1, 1, (10, d))
    psi = trig_poly(d, 1, seed=2)
    g = random_metric(d, 0, seed=2)
    for tau in (lambda z: 0 * z[..., 0], lambda z: 0.4 + 0 * z[..., 0]):
        res = conformal_change_residuals(g, tau, psi, y)
        for key, val in res.items():
            assert np.max(val) < 1e-6, key


@pytest.mark.parametrize("d", [3, 4])
def test_conformal_formulas_seeded(d):
    rng = np.random.default_rng([3, d])
    for i in range(3):
        g = random_metric(d, i, seed=3)
        tau = trig_poly(d, 2 * i, seed=3, amplitude=0.3)
        psi = trig_poly(d, 2 * i + 1, seed=3)
        y = rng.uniform(-1.5, 1.5, (10, d))
        res = conformal_change_residuals(g, tau, psi, y)
        for key, val in res.items():
            assert np.max(val) < 1e-5, key


def test_conformal_formulas_are_not_vacuous():
    # dropping the mixed term from the HS-norm formula must be detected
    from cknlab import diffgeo
    d = 3
    g, tau, psi = _flat(d), trig_poly(d, 0, seed=4, amplitude=0.5), trig_poly(d, 1, seed=4)
    y = np.random.default_rng(4).uniform(-1, 1, (10, d))
    orig = diffgeo.conformal_hessian_hs_norm
    try:
        diffgeo.conformal_hessian_hs_norm = lambda hs, tgp, *rest: orig(hs, 0 * tgp, *rest)
        res = diffgeo.conformal_change_residuals(g, tau, psi, y)
    finally:
        diffgeo.conformal_hessian_hs_norm = orig
    assert np.max(res["hessian_hs_norm"]) > 1e-3


@pytest.mark.parametrize("d", [3, 4, 5])
def test_stereographic_ricci(d):
    y = np.random.default_rng(d).uniform(-1.5, 1.5, (20, d))
    assert stereo_ricci(d, y) < 1e-6
