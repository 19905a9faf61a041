"""Verification suites producing one :class:`VerificationRecord` per check.

Every suite is deterministic for a given ``seed`` and list of dimensions,
so re-running gives bit-identical reports.
"""

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import gamma as gm
from . import inequalities as ineq
from . import invariant as inv
from . import quadrature as quad
from .chart import CylChart, ModelKind, ModelSpace, sample_cartesian, sample_cylinder
from .diffgeo import MetricJet, conformal_change_residuals, conformal_ricci, fd_gradient
from .errors import ConstantMismatch, DegenerateParams, OutsideFSWarning
from .fields import cyl_field, random_metric, sphere_field, trig_poly
from .params import classify, critical_a, derive, fs_curve, sample_theta

REPORT_VERSION = 1
SUITES = ("params", "geometry", "gamma", "inequalities", "invariant")


class Direction(str, enum.Enum):
    TWO_SIDED = "two_sided"          # |residual| <= tolerance
    NONNEGATIVE = "nonnegative"      # residual >= -tolerance
    NEGATIVE = "negative"            # residual < -tolerance
    DISCREPANCY = "discrepancy"      # |residual| > tolerance, a known disagreement


@dataclass(frozen=True)
class VerificationRecord:
    check_id: str
    params: Optional[Tuple[float, float, int]]
    residual: float
    tolerance: float
    passed: bool
    paper_ref: str
    direction: Direction = Direction.TWO_SIDED

    @classmethod
    def make(cls, check_id, params, residual, tolerance, ref, direction=Direction.TWO_SIDED):
        residual = float(residual)
        direction = Direction(direction)
        if not math.isfinite(residual):
            ok = False
        elif direction is Direction.TWO_SIDED:
            ok = abs(residual) <= tolerance
        elif direction is Direction.NONNEGATIVE:
            ok = residual >= -tolerance
        elif direction is Direction.NEGATIVE:
            ok = residual < -tolerance
        else:
            ok = abs(residual) > tolerance
        if params is not None:
            params = (float(params[0]), float(params[1]), int(params[2]))
        return cls(check_id, params, residual, float(tolerance), bool(ok), ref, direction)

    def as_dict(self):
        return {"check_id": self.check_id,
                "params": None if self.params is None else list(self.params),
                "residual": self.residual, "tolerance": self.tolerance, "pass": self.passed,
                "paper_ref": self.paper_ref, "direction": self.direction.value}


def _abd(p):
    return (p.a, p.b, p.d)


def fs_interior(d):
    """A fixed parameter set strictly inside the Felli-Schneider region."""
    return derive(0.0, 0.5, d)


def fs_boundary(d, a=-1.0):
    """Parameters on the Felli-Schneider curve."""
    return derive(a, fs_curve(a, d), d)


def fs_exterior(d):
    """Parameters with ``α = 1``, ``n = 2d`` and ``ρ > d - 1``."""
    a = critical_a(d) - (d - 1)
    return derive(a, a + 0.5, d)


def params_with_n(d, n, a=-0.5):
    return derive(a, 1 + a - d / n, d)


# ---------------------------------------------------------------------------
# params


def suite_params(d_list, seed, samples=10_000):
    out = []
    for d in d_list:
        a, b = sample_theta(d, samples, seed)
        scal = alpha_gap = 0.0
        dgz_not_fs = 0
        fs_not_dgz = 0
        for ai, bi in zip(a, b):
            p = derive(ai, bi, d)
            if not p.n_is_finite:
                continue
            scal = max(scal, abs(p.scaling_residual))
            alpha_gap = max(alpha_gap, abs(p.alpha - p.alpha_from_exponent))
            reg = classify(p)
            dgz_not_fs += reg.in_dgz and not reg.in_fs_by_alpha
            fs_not_dgz += reg.in_fs_by_alpha and not reg.in_dgz
        out.append(VerificationRecord.make(f"params.scaling_identity.d{d}", None, scal, 1e-12,
                                           "scaling identity d = n alpha + p b"))
        out.append(VerificationRecord.make(f"params.alpha_forms.d{d}", None, alpha_gap, 1e-12,
                                           "two expressions for alpha"))
        out.append(VerificationRecord.make(f"params.dgz_within_fs.d{d}", None, dgz_not_fs, 0,
                                           "DGZ region inside Felli-Schneider region"))
        out.append(VerificationRecord.make(f"params.fs_minus_dgz_nonempty.d{d}", None,
                                           fs_not_dgz - 1, 0,
                                           "strict inclusion of the DGZ region",
                                           Direction.NONNEGATIVE))
    p = derive(-2.0, -1.5, 4)
    out.append(VerificationRecord.make("params.fs_characterizations_disagree", _abd(p),
                                       len(classify(p).disagreements()), 0,
                                       "alpha <= 1 versus alpha^2 criterion for Felli-Schneider",
                                       Direction.DISCREPANCY))
    return out


# ---------------------------------------------------------------------------
# geometry


def stereographic_ricci_residual(d, y):
    """``conformal_ricci`` of ``δ`` with ``τ = log((1+|x|²)/2)`` against ``(d-1) g_sphere``."""
    y = np.asarray(y, dtype=float)

    def flat(z):
        return np.broadcast_to(np.eye(d), np.shape(z)[:-1] + (d, d)).copy()

    def tau(z):
        return np.log((1 + np.sum(np.asarray(z) ** 2, axis=-1)) / 2)

    jet = MetricJet(flat, y)
    hess_tau = jet.covariant_hessian(tau)
    dtau = fd_gradient(tau, y)
    gam = np.sum(dtau**2, axis=-1)
    lap = np.trace(hess_tau, axis1=-2, axis2=-1)
    ric = conformal_ricci(jet.ricci(), lap, hess_tau, dtau, gam, jet.g, d)
    g_sphere = jet.g * np.exp(-2 * tau(y))[..., None, None]
    return np.max(np.abs(ric - (d - 1) * g_sphere))


def conformal_formula_errors(d, cases, points, seed):
    worst = {}
    for i in range(cases):
        g = random_metric(d, i, seed)
        tau = trig_poly(d, 2 * i, seed, amplitude=0.3)
        psi = trig_poly(d, 2 * i + 1, seed)
        y = np.random.default_rng([seed, d, i]).uniform(-1.5, 1.5, (points, d))
        for k, v in conformal_change_residuals(g, tau, psi, y).items():
            worst[k] = max(worst.get(k, 0.0), float(np.max(v)))
    return worst


def z_parameter_sets(count, seed):
    out = []
    rng = np.random.default_rng([seed, 99])
    while len(out) < count:
        d = int(rng.integers(3, 6))
        a = critical_a(d) - 4 * (1 - rng.random())
        b = a + 0.05 + 0.9 * rng.random()
        out.append(derive(a, b, d))
    return out


_FORMULA_NAMES = {
    "scalar": "conformal change of scalar curvature",
    "laplacian": "conformal change of the Laplace-Beltrami operator",
    "ricci": "conformal change of the Ricci tensor",
    "hessian": "conformal change of the Hessian",
    "hessian_hs_norm": "Hilbert-Schmidt norm of the conformal Hessian",
    "trace": "trace of the conformal Ricci tensor",
}


def suite_geometry(d_list, seed, cases=5, points=20, z_sets=20):
    out = []
    for abd, target in (((0.0, 0.0, 3), 2 * math.pi**2), ((0.0, 0.0, 4), quad.sphere_area(5))):
        z = quad.normalization_Z(derive(*abd))
        out.append(VerificationRecord.make(f"geometry.z_round.d{abd[2]}", abd, z - target, 1e-8,
                                           "total mass of the round-sphere case"))
    worst = max(abs(quad.z_cartesian(p) / quad.normalization_Z(p) - 1)
                for p in z_parameter_sets(z_sets, seed))
    out.append(VerificationRecord.make("geometry.z_cartesian_vs_cylinder", None, worst, 1e-8,
                                       "normalization constant in two coordinate systems"))
    for d in d_list:
        errs = conformal_formula_errors(d, cases, points, seed)
        for key in ("scalar", "laplacian", "ricci", "hessian", "hessian_hs_norm", "trace"):
            tol = 1e-6 if key == "trace" else 1e-5
            out.append(VerificationRecord.make(f"geometry.{key}.d{d}", None, errs[key], tol,
                                               _FORMULA_NAMES[key]))
        y = np.random.default_rng([seed, d]).uniform(-1.5, 1.5, (points, d))
        out.append(VerificationRecord.make(f"geometry.stereographic_ricci.d{d}", None,
                                           stereographic_ricci_residual(d, y), 1e-6,
                                           "round sphere Ricci from the stereographic factor"))
    return out


# ---------------------------------------------------------------------------
# gamma


def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def gamma_machinery_errors(params, fields, points, seed):
    chart = CylChart(params)
    y = sample_cylinder(params.d, points, seed, margin=0.2)
    closed_def = bochner = decomp = 0.0
    for k in range(fields):
        f = cyl_field(params.d, k, seed)
        closed = gm.gamma2_closed_cylindrical(chart, f, y)
        closed_def = max(closed_def, _rel(gm.gamma2_definitional(chart, f, y), closed))
        bochner = max(bochner, _rel(gm.gamma2_bochner(chart, f, y), closed))
        decomp = max(decomp, float(np.max(gm.cd_decomposition_residual(chart, f, y))))
    return closed_def, bochner, decomp


def cd_parameter_grid(d, size):
    """``size × size`` grid over ``a_c - 4 < a < a_c``, ``a < b < a + 1``."""
    a_c = critical_a(d)
    a_vals = a_c - 4 * (1 - (np.arange(size) + 0.5) / size)
    frac = (np.arange(size) + 0.5) / size
    return [derive(a, a + f, d) for a in a_vals for f in frac]


def suite_gamma(d_list, seed, fields=3, points=20, grid_size=10):
    out = []
    for d in d_list:
        p = fs_interior(d)
        cd_err, boch, dec = gamma_machinery_errors(p, fields, points, seed)
        out.append(VerificationRecord.make(f"gamma.closed_vs_definitional.d{d}", _abd(p), cd_err,
                                           1e-5, "closed cylindrical Gamma_2"))
        out.append(VerificationRecord.make(f"gamma.bochner.d{d}", _abd(p), boch, 1e-5,
                                           "Bochner formula for Gamma_2"))
        out.append(VerificationRecord.make(f"gamma.cd_decomposition.d{d}", _abd(p), dec, 1e-6,
                                           "sum-of-squares decomposition of the CD defect"))
        reports = gm.cd_grid_check(d, cd_parameter_grid(d, grid_size))
        res = max(r.max_residual for r in reports)
        wrong = sum((r.cd_holds != (r.b_dgz >= -gm.CD_TOL)) for r in reports)
        out.append(VerificationRecord.make(f"gamma.cd_tensor_residual.d{d}", None, res, 1e-6,
                                           "CD tensor equals B_DGZ (h - j)"))
        out.append(VerificationRecord.make(f"gamma.cd_verdict_sign.d{d}", None, wrong, 0,
                                           "CD verdict follows the sign of B_DGZ"))
    p = derive(-2.0, -1.5, 4)
    rep = gm.cd_tensor_check(p, integrated=False)
    out.append(VerificationRecord.make("gamma.cd_fails_outside", _abd(p),
                                       rep.pointwise_min_eigenvalue, gm.CD_TOL,
                                       "pointwise CD fails when B_DGZ < 0", Direction.NEGATIVE))
    rep = gm.a_constant_report(3.0, 3)
    out.append(VerificationRecord.make("gamma.a_constant_mismatch", (0.0, 0.0, 3),
                                       rep.printed - rep.derived, 1e-12,
                                       "closed formula for A versus re-derivation",
                                       Direction.DISCREPANCY))
    try:
        gm.resolve_a_constant(3.0, 3)
        refused = 0.0
    except ConstantMismatch:
        refused = 1.0
    out.append(VerificationRecord.make("gamma.a_constant_refused", (0.0, 0.0, 3), refused - 1, 0,
                                       "A is not silently chosen"))
    for k in range(3):
        lhs, rhs, _ = gm.sphere_gamma2_inequality(derive(0.0, 0.5, 4), sphere_field(4, k, seed),
                                                  a_source="derived")
        out.append(VerificationRecord.make(f"gamma.sphere_inequality_derived_a.{k}", (0.0, 0.5, 4),
                                           (lhs - rhs) / abs(lhs), 1e-9,
                                           "weighted Gamma_2 estimate on the sphere",
                                           Direction.NONNEGATIVE))
    return out


# ---------------------------------------------------------------------------
# inequalities


def tanh_eigen_residual(params, points=200, seed=0):
    chart = CylChart(params)
    y = sample_cylinder(params.d, points, seed, margin=0.2)
    a, n = params.alpha, params.n
    f = lambda z: np.tanh(a * z[..., 0])  # noqa: E731
    return float(np.max(np.abs(gm.generator(chart, f, y) + n * a**2 * f(y))))


def suite_inequalities(d_list, seed, fields=5, transfer_m=6):
    out = []
    for d in d_list:
        p = quad.attach_z(fs_interior(d))
        abd = _abd(p)
        y = sample_cylinder(d, 50, seed, margin=0.2)
        out.append(VerificationRecord.make(f"inequalities.tanh_eigenfunction.d{d}", abd,
                                           tanh_eigen_residual(p, seed=seed), 1e-8,
                                           "tanh(alpha s) is a first eigenfunction"))
        c = 0.37
        out.append(VerificationRecord.make(
            f"inequalities.pointwise_identity.d{d}", abd,
            np.max(ineq.pointwise_identity_residual(math.cosh(c), math.sinh(c), p, y)), 1e-9,
            "pointwise identity of the extremal profile"))
        spec = ineq.ExtremalSpec.normalized(c)
        out.append(VerificationRecord.make(
            f"inequalities.euler_lagrange.d{d}", abd,
            np.max(ineq.euler_lagrange_residual(spec, p, y)), 1e-7,
            "Euler-Lagrange equation of the extremal"))
        grid = quad.build_grid(d, p, m=8)
        ext = ineq.make_extremal(spec, p)
        out.append(VerificationRecord.make(f"inequalities.extremal_deficit.d{d}", abd,
                                           ineq.sobolev_deficit(ext, p, grid).deficit, 1e-6,
                                           "radial extremals saturate the Sobolev inequality"))
        sob = poi = math.inf
        for k in range(fields):
            s_rep, p_rep = ineq.both_deficits(cyl_field(d, k, seed), p, grid)
            sob, poi = min(sob, s_rep.deficit), min(poi, p_rep.deficit)
        out.append(VerificationRecord.make(f"inequalities.sobolev_sweep.d{d}", abd, sob, 1e-6,
                                           "Sobolev inequality on the spherical model",
                                           Direction.NONNEGATIVE))
        out.append(VerificationRecord.make(f"inequalities.poincare_sweep.d{d}", abd, poi, 1e-6,
                                           "Poincare inequality on the spherical model",
                                           Direction.NONNEGATIVE))
        mismatch = ineq.conformal_transfer_check(cyl_field(d, 0, seed), p,
                                                 quad.build_grid(d, p, m=transfer_m))
        out.append(VerificationRecord.make(f"inequalities.conformal_transfer.d{d}", abd, mismatch,
                                           1e-5, "Euclidean and spherical forms coincide"))
        for label, q, direction, tol in (
                ("inside", fs_interior(d), Direction.NONNEGATIVE, 0.0),
                ("boundary", fs_boundary(d), Direction.TWO_SIDED, 1e-6),
                ("outside", fs_exterior(d), Direction.NEGATIVE, 1e-8)):
            q = quad.attach_z(q)
            wit = ineq.symmetry_breaking_witness(q, quad.build_grid(d, q, m=8)).deficit
            if label == "inside":
                wit -= 1e-8  # strictly positive
            out.append(VerificationRecord.make(f"inequalities.witness_{label}.d{d}", _abd(q), wit,
                                               tol, "symmetry breaking beyond Felli-Schneider",
                                               direction))
    return out


# ---------------------------------------------------------------------------
# invariant


def suite_invariant(d_list, seed, points=100, taus=3):
    out = []
    for d in d_list:
        for label, p in (("inside", fs_interior(d)), ("outside", fs_exterior(d))):
            for kind in ModelKind:
                sp = ModelSpace(kind, p)
                x = sample_cartesian(sp, points, seed)
                err = np.max(np.abs(inv.s_gamma(sp, p.gamma0, x) - inv.expected_s_gamma0(kind, p)))
                out.append(VerificationRecord.make(
                    f"invariant.s_gamma0.{kind.name.lower()}.{label}.d{d}", _abd(p), err, 1e-7,
                    "constant n-conformal invariant of the CKN spaces"))
            sys_res = np.max(np.abs(inv.coeffs(p.gamma0, p.n, d).system_residuals()))
            out.append(VerificationRecord.make(f"invariant.system.{label}.d{d}", _abd(p), sys_res,
                                               1e-12, "linear conditions on beta and theta"))
        for n in (d + 1, d + 3):
            p = params_with_n(d, n)
            law = yam = 0.0
            for k in range(taus):
                tau = trig_poly(d, k, seed, amplitude=0.3)
                for kind in ModelKind:
                    sp = ModelSpace(kind, p)
                    x = sample_cartesian(sp, 20, seed + k)
                    gam = 0.5 + k
                    law = max(law, float(np.max(inv.transformation_law_residual(sp, gam, tau, x))))
                    yam = max(yam, float(np.max(inv.yamabe_residual(sp, gam, tau, x))))
            out.append(VerificationRecord.make(f"invariant.transformation_law.n{n}.d{d}", _abd(p),
                                               law, 1e-6, "transformation law of an invariant"))
            out.append(VerificationRecord.make(f"invariant.yamabe.n{n}.d{d}", _abd(p), yam, 1e-6,
                                               "Yamabe-type reformulation"))
        try:
            inv.coeffs(0.0, float(d), d)
            refused = 0.0
        except DegenerateParams:
            refused = 1.0
        out.append(VerificationRecord.make(f"invariant.refuses_n_equal_d.d{d}", None, refused - 1,
                                           0, "invariant requires n > d"))
    return out


_SUITE_FUNCS = {"params": suite_params, "geometry": suite_geometry, "gamma": suite_gamma,
                "inequalities": suite_inequalities, "invariant": suite_invariant}


def run_suite(name, d_list, seed=0):
    """Records of one suite, or of every suite for ``name == "all"``."""
    names = SUITES if name == "all" else (name,)
    for nm in names:
        if nm not in _SUITE_FUNCS:
            raise ValueError(f"unknown suite {nm!r}")
    d_list = [int(d) for d in d_list]
    if not d_list or any(d < 3 for d in d_list):
        raise DegenerateParams(f"dimensions must be integers >= 3, got {d_list}")
    records = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideFSWarning)
        for nm in names:
            records.extend(_SUITE_FUNCS[nm](d_list, seed))
    return records


def report(records, seed):
    return {"version": REPORT_VERSION, "seed": seed, "records": [r.as_dict() for r in records]}
