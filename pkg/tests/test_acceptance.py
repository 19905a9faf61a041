"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line."""

import io
import math
import time

import numpy as np
import pytest

from cknlab import gamma as gm
from cknlab import inequalities as ineq
from cknlab import invariant as inv
from cknlab import quadrature as quad
from cknlab import regions, verify
from cknlab.chart import CylChart, ModelKind, ModelSpace, sample_cartesian, sample_cylinder
from cknlab.cli import main
from cknlab.fields import cyl_field, trig_poly
from cknlab.params import classify, derive, sample_theta

SEED = 7


@pytest.fixture
def report(capsys):
    """Print ``criterion N: PASS|FAIL ...`` to the terminal, bypassing capture."""

    def emit(number, ok, detail, started=None, budget=None):
        elapsed = "" if started is None else f" [{time.perf_counter() - started:.1f}s"
        if budget is not None:
            elapsed += f" / budget {budget:.0f}s"
        elapsed += "]" if elapsed else ""
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}{elapsed}")
        return ok

    return emit


def _within(started, budget):
    return time.perf_counter() - started < budget


def test_criterion_01_parameter_numerology(report):
    t0 = time.perf_counter()
    scal = gap = 0.0
    for d in (3, 4, 5):
        a, b = sample_theta(d, 10_000, SEED)
        for ai, bi in zip(a, b):
            p = derive(ai, bi, d)
            scal = max(scal, abs(d - p.n * p.alpha - p.p * p.b))
            gap = max(gap, abs(p.alpha - p.alpha_from_exponent))
    ok = scal < 1e-12 and gap < 1e-12 and _within(t0, 1.0)
    assert report(1, ok, f"max|d - n alpha - p b| = {scal:.2e}, alpha forms gap = {gap:.2e} (tol 1e-12)",
                  t0, 1)


def test_criterion_02_region_inclusion(report):
    bad = strict = 0
    for d in (3, 4, 5):
        a, b = sample_theta(d, 10_000, SEED)
        for ai, bi in zip(a, b):
            reg = classify(derive(ai, bi, d))
            bad += reg.in_dgz and not reg.in_fs_by_alpha
            strict += reg.in_fs_by_alpha and not reg.in_dgz
    disagreement = classify(derive(-2.0, -1.5, 4)).disagreements()
    ok = bad == 0 and strict > 0 and bool(disagreement)
    assert report(2, ok, f"DGZ outside FS: {bad}, FS minus DGZ: {strict}, "
                         f"(4,-2,-1.5) disagreement reported: {disagreement}")


def test_criterion_03_normalization(report):
    t0 = time.perf_counter()
    e3 = abs(quad.normalization_Z(derive(0, 0, 3)) - 2 * math.pi**2)
    e4 = abs(quad.normalization_Z(derive(0, 0, 4)) - quad.sphere_area(5))
    cross = max(abs(quad.z_cartesian(p) / quad.normalization_Z(p) - 1)
                for p in verify.z_parameter_sets(20, SEED))
    ok = e3 < 1e-8 and e4 < 1e-8 and cross < 1e-8 and _within(t0, 5.0)
    assert report(3, ok, f"Z round errors {e3:.1e}, {e4:.1e}; Cartesian vs cylinder {cross:.1e} "
                         f"(tol 1e-8)", t0, 5)


def test_criterion_04_conformal_formulas(report):
    t0 = time.perf_counter()
    worst = {}
    for d in (3, 4):
        for k, v in verify.conformal_formula_errors(d, 50, 20, SEED).items():
            worst[k] = max(worst.get(k, 0.0), v)
    stereo = max(verify.stereographic_ricci_residual(
        d, np.random.default_rng([SEED, d]).uniform(-1.5, 1.5, (20, d))) for d in (3, 4))
    formulas = max(v for k, v in worst.items() if k != "trace")
    ok = formulas < 1e-5 and stereo < 1e-6 and _within(t0, 60.0)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items()))
    assert report(4, ok, f"{detail} (tol 1e-5); stereographic Ricci {stereo:.1e}", t0, 60)


def test_criterion_05_gamma2_machinery(report):
    t0 = time.perf_counter()
    closed_def, bochner, decomp = verify.gamma_machinery_errors(verify.fs_interior(4), 20, 100, SEED)
    ok = closed_def < 1e-5 and bochner < 1e-5 and decomp < 1e-6 and _within(t0, 60.0)
    assert report(5, ok, f"closed vs definitional {closed_def:.1e}, Bochner {bochner:.1e} "
                         f"(tol 1e-5); decomposition {decomp:.1e} (tol 1e-6)", t0, 60)


def test_criterion_06_cd_verdict(report):
    t0 = time.perf_counter()
    res, wrong, count = 0.0, 0, 0
    for d in (3, 4, 5):
        reports = gm.cd_grid_check(d, verify.cd_parameter_grid(d, 50))
        res = max(res, max(r.max_residual for r in reports))
        wrong += sum(r.cd_holds != (r.b_dgz >= -gm.CD_TOL) for r in reports)
        count += len(reports)
    ok = res < 1e-6 and wrong == 0 and _within(t0, 30.0)
    assert report(6, ok, f"{count} parameter sets, max residual {res:.1e} (tol 1e-6), "
                         f"verdicts against sign(B_DGZ) wrong: {wrong}", t0, 30)


def test_criterion_07_eigenfunction_and_extremals(report):
    p = quad.attach_z(derive(0.0, 0.5, 4))
    eig = verify.tanh_eigen_residual(p, points=400, seed=SEED)
    y = sample_cylinder(4, 200, SEED, margin=0.2)
    ident = max(float(np.max(ineq.pointwise_identity_residual(math.cosh(c), math.sinh(c), p, y)))
                for c in (0.0, 0.5, -1.2))
    el = max(float(np.max(ineq.euler_lagrange_residual(ineq.ExtremalSpec.normalized(c), p, y)))
             for c in (0.0, 0.5, -1.2))
    deficit = ineq.sobolev_deficit(ineq.make_extremal(ineq.ExtremalSpec.normalized(0.0), p), p,
                                   quad.build_grid(4, p)).deficit
    ok = eig < 1e-8 and ident < 1e-9 and el < 1e-7 and abs(deficit) < 1e-6
    assert report(7, ok, f"eigenfunction {eig:.1e} (1e-8), identity {ident:.1e} (1e-9), "
                         f"Euler-Lagrange {el:.1e} (1e-7), extremal deficit {deficit:.1e} (1e-6)")


def test_criterion_08_symmetry_breaking(report):
    inside, boundary, outside = [], [], []
    for d in (3, 4, 5):
        for bucket, p in ((inside, verify.fs_interior(d)), (boundary, verify.fs_boundary(d)),
                          (outside, verify.fs_exterior(d))):
            p = quad.attach_z(p)
            bucket.append(ineq.symmetry_breaking_witness(p, quad.build_grid(d, p, m=8)).deficit)
    ok = min(inside) > 0 and max(map(abs, boundary)) < 1e-6 and max(outside) < -1e-8
    assert report(8, ok, f"inside min {min(inside):.2e} (> 0), boundary max|.| "
                         f"{max(map(abs, boundary)):.1e} (1e-6), outside max {max(outside):.2e} (< -1e-8)")


def test_criterion_09_conformal_invariant(report):
    s_err, law, system = 0.0, 0.0, 0.0
    for d in (3, 4):
        for p in (verify.fs_interior(d), verify.fs_exterior(d)):
            for kind in ModelKind:
                sp = ModelSpace(kind, p)
                x = sample_cartesian(sp, 100, SEED)
                s_err = max(s_err, float(np.max(np.abs(
                    inv.s_gamma(sp, p.gamma0, x) - inv.expected_s_gamma0(kind, p)))))
            system = max(system, abs(inv.coeffs(p.gamma0, p.n, d).system_residuals()[2]))
        p = verify.params_with_n(d, d + 2)
        for k in range(3):
            tau = trig_poly(d, k, SEED, amplitude=0.3)
            for kind in ModelKind:
                sp = ModelSpace(kind, p)
                x = sample_cartesian(sp, 20, SEED + k)
                law = max(law, float(np.max(inv.transformation_law_residual(sp, 0.5 + k, tau, x))))
    ok = s_err < 1e-7 and law < 1e-6 and system < 1e-12
    assert report(9, ok, f"S_gamma0 {s_err:.1e} (1e-7), transformation law {law:.1e} (1e-6), "
                         f"third linear condition {system:.1e} (1e-12)")


def test_criterion_10_region_figure(report):
    out = io.StringIO()
    code = main(["regions", "-d", "4", "--a-min", "-4", "--a-max", "0.99", "--steps", "500"], out)
    rows = regions.parse_csv(out.getvalue())
    violations = regions.dominance_violations(rows)
    at0 = regions.region_rows(4, -2.0, 0.0, 2)
    origin = max(abs(at0[1].b_fs), abs(at0[1].b_dgz))
    fs_m2 = abs(at0[0].b_fs - (math.sqrt(3) - 3))
    ok = code == 0 and not violations and origin < 1e-12 and fs_m2 < 1e-12
    assert report(10, ok, f"{len(rows)} rows, dominance violations {len(violations)}, "
                          f"curves at origin {origin:.1e}, b_fs(-2) error {fs_m2:.1e} (1e-12)")


def test_criterion_11_inequality_sweeps(report):
    t0 = time.perf_counter()
    sob = poi = math.inf
    transfer = 0.0
    for d, m in ((3, 10), (4, 8)):
        p = quad.attach_z(verify.fs_interior(d))
        grid = quad.build_grid(d, p, m=m)
        for k in range(50):
            s_rep, p_rep = ineq.both_deficits(cyl_field(d, k, SEED), p, grid)
            sob, poi = min(sob, s_rep.deficit), min(poi, p_rep.deficit)
        transfer = max(transfer, ineq.conformal_transfer_check(cyl_field(d, 0, SEED), p,
                                                               quad.build_grid(d, p, m=6)))
    ok = sob >= -1e-6 and poi >= -1e-6 and transfer < 1e-5 and _within(t0, 120.0)
    assert report(11, ok, f"min Sobolev deficit {sob:.2e}, min Poincare deficit {poi:.2e} "
                          f"(>= -1e-6), transfer mismatch {transfer:.1e} (1e-5)", t0, 120)
