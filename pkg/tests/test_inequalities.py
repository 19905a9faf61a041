import math

import numpy as np
import pytest

from cknlab import derive
from cknlab import inequalities as ineq
from cknlab import quadrature as quad
from cknlab.chart import ModelKind, ModelSpace, sample_cartesian, sample_cylinder
from cknlab.errors import SpecError
from cknlab.fields import cyl_field
from cknlab.verify import fs_boundary, fs_exterior, fs_interior


@pytest.fixture(scope="module")
def setup():
    p = quad.attach_z(derive(0.0, 0.5, 4))
    return p, quad.build_grid(4, p, m=8)


def test_constants_are_equality_cases(setup):
    p, grid = setup
    one = ineq.RadialProfile(1.0, 0.0, p.alpha, -1.0)
    assert abs(ineq.sobolev_deficit(one, p, grid).deficit) < 1e-12
    assert abs(ineq.poincare_deficit(one, p, grid).deficit) < 1e-12
    assert ineq.sobolev_deficit(one, p, grid).verdict is ineq.Verdict.EQUALITY


@pytest.mark.parametrize("c", [0.0, 0.4, -1.1])
def test_radial_extremals(setup, c):
    p, grid = setup
    spec = ineq.ExtremalSpec.normalized(c)
    assert abs(ineq.sobolev_deficit(ineq.make_extremal(spec, p), p, grid).deficit) < 1e-6
    assert ineq.extremal_normalization(spec, p, grid) == pytest.approx(1, abs=1e-12)


def test_unnormalized_profile(setup):
    p, grid = setup
    spec = ineq.ExtremalSpec(2.0, 0.5)
    assert ineq.extremal_normalization(spec, p, grid) != pytest.approx(1, abs=1e-3)
    y = sample_cylinder(4, 20, seed=1, margin=0.2)
    assert np.max(ineq.pointwise_identity_residual(2.0, 0.5, p, y)) > 1e-3
    assert np.max(ineq.euler_lagrange_residual(spec, p, y)) > 1e-3
    # Sobolev is scale-invariant, so the deficit still vanishes
    assert abs(ineq.sobolev_deficit(ineq.make_extremal(spec, p), p, grid).deficit) < 1e-6


def test_identity_and_euler_lagrange(setup):
    p, _ = setup
    y = sample_cylinder(4, 50, seed=2, margin=0.2)
    c = 0.7
    assert np.max(ineq.pointwise_identity_residual(math.cosh(c), math.sinh(c), p, y)) < 1e-9
    spec = ineq.ExtremalSpec.normalized(c)
    assert np.max(ineq.euler_lagrange_residual(spec, p, y)) < 1e-7


def test_poincare_extremals(setup):
    p, grid = setup
    for c in (0.0, 0.8):
        v = ineq.make_extremal(ineq.ExtremalSpec.normalized(c, ineq.ExtremalMode.POINCARE), p)
        assert abs(ineq.poincare_deficit(v, p, grid).deficit) < 1e-9


def test_make_extremal_rejections(setup):
    p, _ = setup
    with pytest.raises(SpecError):
        ineq.make_extremal(ineq.ExtremalSpec(0.5, 1.0), p)
    with pytest.raises(SpecError):
        ineq.make_extremal(ineq.ExtremalSpec(1.0, 0.0, 0.3, ineq.ExtremalMode.POINCARE), p)
    with pytest.raises(SpecError):
        ineq.make_extremal(ineq.ExtremalSpec(1.0, 0.0, 0.3, ineq.ExtremalMode.POINCARE_BOUNDARY), p)
    with pytest.raises(SpecError):
        ineq.make_extremal(ineq.ExtremalSpec(1.0, 0.0, 0, ineq.ExtremalMode.SOBOLEV_ROUND_SPHERE), p)


def test_round_sphere_extremal():
    p = quad.attach_z(derive(0.0, 0.0, 3))
    grid = quad.build_grid(3, p, m=16)
    v = ineq.make_extremal(ineq.ExtremalSpec(1.0, 0.6, 0.0, ineq.ExtremalMode.SOBOLEV_ROUND_SPHERE), p)
    assert abs(ineq.sobolev_deficit(v, p, grid).deficit) < 1e-6


def test_boundary_poincare_mode():
    d = 4
    p = quad.attach_z(fs_boundary(d))
    grid = quad.build_grid(d, p, m=8)
    v = ineq.make_extremal(ineq.ExtremalSpec(1.0, 0.3, 0.5, ineq.ExtremalMode.POINCARE_BOUNDARY), p)
    assert abs(ineq.poincare_deficit(v, p, grid).deficit) < 1e-6


@pytest.mark.parametrize("d", [3, 4])
def test_witness_regimes(d):
    for p, sign in ((fs_interior(d), 1), (fs_boundary(d), 0), (fs_exterior(d), -1)):
        p = quad.attach_z(p)
        rep = ineq.symmetry_breaking_witness(p, quad.build_grid(d, p, m=8))
        exact = ineq.witness_deficit_exact(p)
        assert rep.deficit == pytest.approx(exact, abs=1e-9)
        if sign > 0:
            assert rep.deficit > 1e-8
        elif sign < 0:
            assert rep.deficit < -1e-8
        else:
            assert abs(rep.deficit) < 1e-6


def test_linearization_tends_to_poincare(setup):
    p, grid = setup
    f = cyl_field(4, 1, seed=1)
    poi = ineq.poincare_deficit(f, p, grid).deficit
    errs = [abs(ineq.linearization_ratio(f, p, eps, grid) - poi) for eps in (1e-1, 5e-2, 2.5e-2)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 0.05 * max(1.0, abs(poi))


def test_seeded_sweep_is_one_sided(setup):
    p, grid = setup
    for k in range(6):
        s_rep, p_rep = ineq.both_deficits(cyl_field(4, k, seed=2), p, grid)
        assert s_rep.deficit >= -1e-6
        assert p_rep.deficit >= -1e-6
        assert s_rep.deficit == pytest.approx(ineq.sobolev_deficit(cyl_field(4, k, seed=2), p, grid).deficit)


def test_conformal_transfer(setup):
    p, _ = setup
    grid = quad.build_grid(4, p, m=6)
    assert ineq.conformal_transfer_check(cyl_field(4, 0, seed=3), p, grid) < 1e-5
    bump = lambda y: np.exp(-((y[..., 0] - 0.5) ** 2)) * (1.2 + np.cos(y[..., 1]))  # noqa: E731
    assert ineq.conformal_transfer_check(bump, p, grid) < 1e-5


@pytest.mark.parametrize("kind", [ModelKind.SPHERICAL, ModelKind.HYPERBOLIC])
def test_transfer_scalar_identity(kind):
    p = derive(-0.5, 0.1, 3)
    x = sample_cartesian(ModelSpace(kind, p), 30, seed=4)
    assert np.max(ineq.transfer_scalar_identity_residual(p, x, kind)) < 1e-7
    with pytest.raises(ValueError):
        ineq.transfer_scalar_identity_residual(p, x, ModelKind.EUCLIDEAN)
