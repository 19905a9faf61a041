import math

import numpy as np
import pytest
from scipy import integrate as sint
from scipy import special

from cknlab import derive
from cknlab import quadrature as quad
from cknlab.chart import sphere_from_angles
from cknlab.errors import DegenerateParams, MissingZ, NonFinite
from cknlab.verify import z_parameter_sets


@pytest.mark.parametrize("d, area", [(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2),
                                     (5, 8 * math.pi**2 / 3)])
def test_sphere_area(d, area):
    assert quad.sphere_area(d) == pytest.approx(area, rel=1e-14)
    assert quad.integrate_sphere(lambda th: np.ones(th.shape[:-1]), d) == pytest.approx(area, rel=1e-13)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_sphere_rule_moments(d):
    # ∫ ω_1² = |S^{d-1}|/d and odd moments vanish
    ang, w = quad.sphere_rule(d, 8)
    om = sphere_from_angles(ang)
    assert np.sum(w * om[:, 0] ** 2) == pytest.approx(quad.sphere_area(d) / d, rel=1e-13)
    assert abs(np.sum(w * om[:, -1] ** 3)) < 1e-14
    assert np.sum(w * om[:, 0] ** 2 * om[:, 1] ** 2) == pytest.approx(
        quad.sphere_area(d) / (d * (d + 2)), rel=1e-12)


def test_cosh_integrals():
    assert quad.cosh_integral(3) * 2 == pytest.approx(math.pi / 2, rel=1e-13)
    assert 2 * quad.cosh_integral(2) == pytest.approx(2.0, rel=1e-13)
    for n in (2.5, 4.0, 7.3, 12.0):
        ref = sint.quad(lambda s: np.cosh(s) ** -n, -80, 80, points=[0])[0]
        assert 2 * quad.cosh_integral(n) == pytest.approx(ref, rel=1e-10)
        assert 2 * quad.cosh_integral(n) == pytest.approx(special.beta(n / 2, 0.5), rel=1e-12)


def test_round_sphere_totals():
    assert quad.normalization_Z(derive(0, 0, 3)) == pytest.approx(2 * math.pi**2, abs=1e-8)
    assert quad.normalization_Z(derive(0, 0, 4)) == pytest.approx(quad.sphere_area(5), abs=1e-8)


def test_z_forms_agree():
    for p in z_parameter_sets(20, 1):
        z = quad.normalization_Z(p)
        assert quad.z_closed_form(p.alpha, p.n, p.d) == pytest.approx(z, rel=1e-12)
        assert quad.z_footnote(p) == pytest.approx(z, rel=1e-10)
        assert quad.z_cartesian(p) == pytest.approx(z, rel=1e-8)


def test_z_scales_inversely_with_alpha():
    assert quad.z_closed_form(0.25, 6.0, 3) == pytest.approx(2 * quad.z_closed_form(0.5, 6.0, 3),
                                                             rel=1e-14)


def test_z_refuses():
    with pytest.raises(DegenerateParams):
        quad.normalization_Z(derive(-0.5, 0.5, 3))
    with pytest.raises(MissingZ):
        from cknlab.params import sobolev_constant
        sobolev_constant(derive(0, 0.5, 4))


def test_grid_integrates_measure_to_z():
    p = derive(0, 0.5, 4)
    grid = quad.build_grid(4, p, m=6)
    total = quad.integrate(lambda y: np.ones(y.shape[:-1]), grid)
    assert total == pytest.approx(quad.normalization_Z(p), rel=1e-12)
    with pytest.raises(DegenerateParams):
        quad.build_grid(3, p)


def test_odd_integrand_vanishes():
    p = derive(-0.5, 0.2, 3)
    grid = quad.build_grid(3, p, m=8)
    val = quad.integrate(lambda y: np.tanh(p.alpha * y[..., 0]) * (1 + np.cos(y[..., 1]) ** 2), grid)
    assert abs(val) < 1e-12


def test_resolution_doubling_is_stable():
    p = derive(-1.0, -0.3, 4)
    f = lambda y: np.exp(0.3 * np.sin(y[..., 0]) * np.cos(y[..., 1]))  # noqa: E731
    coarse = quad.integrate(f, quad.build_grid(4, p, m=8))
    fine = quad.integrate(f, quad.build_grid(4, p, m=16, refine=2))
    assert coarse == pytest.approx(fine, rel=1e-10)


def test_vector_valued_integrand():
    p = derive(0, 0.5, 3)
    grid = quad.build_grid(3, p, m=6)
    out = quad.integrate(lambda y: np.stack([np.ones(y.shape[:-1]), 2 * np.ones(y.shape[:-1])], -1), grid)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(2 * out[0], rel=1e-14)


def test_nonfinite_integrand():
    p = derive(0, 0.5, 3)
    grid = quad.build_grid(3, p, m=4)
    with pytest.raises(NonFinite):
        quad.integrate(lambda y: np.full(y.shape[:-1], np.nan), grid)


def test_cartesian_vs_cylindrical_moment():
    # ∫ |x|^{2α}/(1+|x|^{2α})² dμ in both coordinate systems
    p = derive(-0.5, 0.1, 3)
    a, n, d = p.alpha, p.n, p.d
    grid = quad.build_grid(d, p, m=4)
    cyl = quad.integrate(lambda y: (np.tanh(a * y[..., 0]) ** 2) * np.ones(y.shape[:-1]), grid)

    def radial(r):
        w = r ** (2 * a)
        dens = 2**n * r ** (d - 1 - p.b * p.p) * (1 + w) ** (-n)
        return ((1 - w) / (1 + w)) ** 2 * dens

    ref = quad.sphere_area(d) * sint.quad(radial, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
    assert cyl == pytest.approx(ref, rel=1e-8)
