"""Γ-calculus on the CKN spaces.

A diffusion ``L f = A^{ij} ∂_ij f + b^i ∂_i f`` has carré du champ
``Γ(f, g) = A^{ij} ∂_i f ∂_j g``.  The definitional ``Γ₂`` is assembled
from derivatives of ``f`` up to third order (finite differences) and
derivatives of the coefficients ``A`` and ``b`` (finite differences of the
analytic coefficient functions), never from a fourth-order difference of a
composite field.

In the cylindrical chart of the spherical CKN space every quantity has a
closed form in terms of ``∂_s f``, ``∂_ss f``, the mixed derivatives and
the round-sphere Hessian of ``f``; those are implemented alongside.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from . import quadrature
from .chart import CylChart, sample_cylinder, sphere_from_angles, sphere_metric_diag
from .diffgeo import (DEFAULT_REL_STEP, MetricJet, fd_gradient, fd_hessian, hs_norm_sq,
                      sym_matrix)
from .errors import ConstantMismatch, DegenerateParams, PositivityError

# third derivatives: Hessian (outer step) of a finite-difference gradient (inner step);
# larger steps than the default keep the nested roundoff below the truncation error
THIRD_ORDER_INNER_STEP = 3e-3
THIRD_ORDER_OUTER_STEP = 3e-2


def _domain(space):
    return getattr(space, "contains", None)


def jet(f, y, order=2, space=None, rel_step=DEFAULT_REL_STEP):
    """Value and coordinate derivatives of ``f`` at ``y`` up to ``order`` (<= 3)."""
    y = np.asarray(y, dtype=float)
    dom = _domain(space) if space is not None else None
    out = [np.asarray(f(y), dtype=float)]
    if order >= 1:
        out.append(fd_gradient(f, y, rel_step, dom))
    if order >= 2:
        out.append(sym_matrix(fd_hessian(f, y, rel_step, dom)))
    if order >= 3:
        inner = lambda z: fd_gradient(f, z, THIRD_ORDER_INNER_STEP, dom)  # noqa: E731
        out.append(fd_hessian(inner, y, THIRD_ORDER_OUTER_STEP, dom))
    return out


def carre_du_champ(space, f, g=None, p=None, rel_step=DEFAULT_REL_STEP):
    """``Γ(f, g)`` at ``p`` (``Γ(f)`` when ``g`` is None)."""
    p = np.asarray(p, dtype=float)
    space.check(p)
    dom = space.contains
    df = fd_gradient(f, p, rel_step, dom)
    dg = df if g is None else fd_gradient(g, p, rel_step, dom)
    return np.einsum("...ij,...i,...j->...", space.inv_metric(p), df, dg)


def generator(space, f, p, rel_step=DEFAULT_REL_STEP):
    """``L f`` at ``p``."""
    p = np.asarray(p, dtype=float)
    space.check(p)
    _, df, hf = jet(f, p, 2, space, rel_step)
    return (np.einsum("...ij,...ij->...", space.inv_metric(p), hf)
            + np.einsum("...i,...i->...", space.drift(p), df))


def gamma2_definitional(space, f, p, rel_step=DEFAULT_REL_STEP):
    """``Γ₂(f) = ½ L Γ(f) - Γ(f, L f)`` expanded by the product rule."""
    p = np.asarray(p, dtype=float)
    space.check(p)
    dom = space.contains
    _, f1, f2, f3 = jet(f, p, 3, space, rel_step)
    A = space.inv_metric(p)
    b = space.drift(p)
    dA = fd_gradient(space.inv_metric, p, rel_step, dom)      # [i, j, k] = ∂_k A^ij
    ddA = fd_hessian(space.inv_metric, p, rel_step, dom)      # [i, j, k, l]
    db = fd_gradient(space.drift, p, rel_step, dom)           # [i, k] = ∂_k b^i

    # derivatives of Γ(f) = A^ij f_i f_j
    d_gam = (np.einsum("...ijk,...i,...j->...k", dA, f1, f1)
             + 2 * np.einsum("...ij,...ik,...j->...k", A, f2, f1))
    dd_gam = (np.einsum("...ijkl,...i,...j->...kl", ddA, f1, f1)
              + 2 * np.einsum("...ijk,...il,...j->...kl", dA, f2, f1)
              + 2 * np.einsum("...ijl,...ik,...j->...kl", dA, f2, f1)
              + 2 * np.einsum("...ij,...ikl,...j->...kl", A, f3, f1)
              + 2 * np.einsum("...ij,...ik,...jl->...kl", A, f2, f2))
    l_gam = np.einsum("...kl,...kl->...", A, dd_gam) + np.einsum("...k,...k->...", b, d_gam)

    # derivative of L f
    d_lf = (np.einsum("...ijk,...ij->...k", dA, f2)
            + np.einsum("...ij,...ijk->...k", A, f3)
            + np.einsum("...ik,...i->...k", db, f1)
            + np.einsum("...i,...ik->...k", b, f2))
    gam_f_lf = np.einsum("...kl,...k,...l->...", A, f1, d_lf)
    return 0.5 * l_gam - gam_f_lf


def gamma2_bochner(space, f, p, weight_dim=None, rel_step=DEFAULT_REL_STEP):
    """``Ric(L)(∇f, ∇f) + ‖∇∇f‖²`` with ``Ric(L) = Ric_g + ∇∇W`` from FD oracles."""
    p = np.asarray(p, dtype=float)
    space.check(p)
    mj = MetricJet(space.metric_lower, p, rel_step, space.contains)
    ric = mj.ricci() + mj.covariant_hessian(space.weight, rel_step, space.contains)
    df = fd_gradient(f, p, rel_step, space.contains)
    hess = mj.covariant_hessian(f, rel_step, space.contains)
    grad_up = np.einsum("...ij,...j->...i", mj.g_inv, df)
    return np.einsum("...ij,...i,...j->...", ric, grad_up, grad_up) + hs_norm_sq(hess, mj.g_inv)


# ---------------------------------------------------------------------------
# round sphere in iterated polar angles


def sphere_christoffel(theta):
    """Christoffel symbols ``Γ^c_ab`` (layout ``[..., c, a, b]``) of the round sphere."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1]
    g = sphere_metric_diag(theta)
    # dlog[k, j] = ∂_j log G_k = 2 cot θ_j for j < k
    cot = 1 / np.tan(theta)
    dlog = np.zeros(theta.shape + (m,))
    for k in range(m):
        for j in range(k):
            dlog[..., k, j] = 2 * cot[..., j]
    gam = np.zeros(theta.shape[:-1] + (m, m, m))
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            # Γ^a_ab = Γ^a_ba = ½ ∂_b log G_a
            gam[..., a, a, b] = 0.5 * dlog[..., a, b]
            gam[..., a, b, a] = 0.5 * dlog[..., a, b]
            # Γ^b_aa = -½ ∂_b G_a / G_b
            gam[..., b, a, a] = -0.5 * g[..., a] * dlog[..., a, b] / g[..., b]
    return gam


@dataclass
class CylJet:
    """Cylinder derivatives of ``f`` split into ``s`` and sphere parts."""

    value: np.ndarray
    f_s: np.ndarray
    f_ss: np.ndarray
    grad_th: np.ndarray        # ∂_θ f
    grad_th_s: np.ndarray      # ∂_θ ∂_s f
    hess_th: np.ndarray        # covariant round-sphere Hessian of f
    g_th: np.ndarray           # diagonal of G_θ

    def gamma_th(self, u, v):
        return np.sum(u * v / self.g_th, axis=-1)

    @property
    def lap_th(self):
        return np.sum(np.diagonal(self.hess_th, axis1=-2, axis2=-1) / self.g_th, axis=-1)

    @property
    def hess_th_norm_sq(self):
        inv = 1 / self.g_th
        return np.einsum("...a,...b,...ab,...ab->...", inv, inv, self.hess_th, self.hess_th)


def cyl_jet(f, y, rel_step=DEFAULT_REL_STEP, domain=None):
    y = np.asarray(y, dtype=float)
    val = np.asarray(f(y), dtype=float)
    grad = fd_gradient(f, y, rel_step, domain)
    hess = sym_matrix(fd_hessian(f, y, rel_step, domain))
    theta = y[..., 1:]
    chris = sphere_christoffel(theta)
    h_th = hess[..., 1:, 1:] - np.einsum("...cab,...c->...ab", chris, grad[..., 1:])
    return CylJet(value=val, f_s=grad[..., 0], f_ss=hess[..., 0, 0], grad_th=grad[..., 1:],
                  grad_th_s=hess[..., 0, 1:], hess_th=h_th, g_th=sphere_metric_diag(theta))


def _chart_constants(chart, s):
    alpha, n, d = chart.alpha, chart.n, chart.d
    phi = chart.phi(s)
    r = chart.phi_ratio(s)
    b_dgz = (d - 2) - (n - 2) * alpha**2
    return alpha, n, d, phi, r, b_dgz


def _as_chart(params_or_chart):
    if isinstance(params_or_chart, CylChart):
        return params_or_chart
    return CylChart(params_or_chart)


def gamma2_closed_cylindrical(params, f, p, rel_step=DEFAULT_REL_STEP):
    """Closed form of ``Γ̄₂(f)`` in the chart ``(s, θ)``.

    ``params`` may be a :class:`CknParams` or a :class:`CylChart`.
    """
    chart = _as_chart(params)
    p = np.asarray(p, dtype=float)
    chart.check(p)
    j = cyl_jet(f, p, rel_step, chart.contains)
    alpha, n, d, phi, r, b_dgz = _chart_constants(chart, p[..., 0])
    gth = j.gamma_th
    out = (j.f_ss**2 + j.hess_th_norm_sq + 2 * gth(j.grad_th_s, j.grad_th_s)
           + 2 * r * j.f_ss * j.f_s + 4 * r * gth(j.grad_th_s, j.grad_th)
           - 2 * r * j.f_s * j.lap_th
           + j.f_s**2 * (d * r**2 + alpha**2 * ((d - 1) / phi**2 + n - d))
           + gth(j.grad_th, j.grad_th) * (2 * r**2 + alpha**2 * (n - 1) / phi**2 + b_dgz))
    return phi**4 * out


def cylindrical_generator(params, f, p, rel_step=DEFAULT_REL_STEP):
    """``φ² [∂_ss f + (2-n)(φ'/φ) ∂_s f + Δ_θ f]``."""
    chart = _as_chart(params)
    p = np.asarray(p, dtype=float)
    chart.check(p)
    j = cyl_jet(f, p, rel_step, chart.contains)
    _, n, _, phi, r, _ = _chart_constants(chart, p[..., 0])
    return phi**2 * (j.f_ss + (2 - n) * r * j.f_s + j.lap_th)


def cd_decomposition_terms(params, f, p, gamma2="closed", rel_step=DEFAULT_REL_STEP):
    """Both sides of the cylindrical decomposition of ``Γ̄₂ - ρΓ̄ - (L̄f)²/n``.

    Returns ``(lhs, rhs)`` where ``lhs = φ^{-4}(Γ̄₂ - ρ Γ̄ - (L̄ f)²/n)`` and
    ``rhs`` is the sum of squares plus ``B_DGZ Γ^θ(f)``.
    """
    chart = _as_chart(params)
    p = np.asarray(p, dtype=float)
    chart.check(p)
    j = cyl_jet(f, p, rel_step, chart.contains)
    alpha, n, d, phi, r, b_dgz = _chart_constants(chart, p[..., 0])
    gth = j.gamma_th
    lap = j.lap_th
    if gamma2 == "closed":
        g2 = gamma2_closed_cylindrical(chart, f, p, rel_step)
    elif gamma2 == "definitional":
        g2 = gamma2_definitional(chart, f, p, rel_step)
    else:
        raise ValueError(f"unknown gamma2 source {gamma2!r}")
    rho = alpha**2 * (n - 1)
    gam = phi**2 * (j.f_s**2 + gth(j.grad_th, j.grad_th))
    lf = phi**2 * (j.f_ss + (2 - n) * r * j.f_s + lap)
    lhs = (g2 - rho * gam - lf**2 / n) / phi**4
    mixed = j.grad_th_s + np.asarray(r)[..., None] * j.grad_th
    rhs = ((n - 1) / n * (j.f_ss + 2 * r * j.f_s - lap / (n - 1)) ** 2
           + j.hess_th_norm_sq - lap**2 / (n - 1)
           + 2 * gth(mixed, mixed) + b_dgz * gth(j.grad_th, j.grad_th))
    return lhs, rhs


def cd_decomposition_residual(params, f, p, gamma2="closed", rel_step=DEFAULT_REL_STEP):
    lhs, rhs = cd_decomposition_terms(params, f, p, gamma2, rel_step)
    return np.abs(rhs - lhs)


def hessian_cauchy_schwarz_gap(f, p, rel_step=DEFAULT_REL_STEP):
    """``‖∇∇_θ f‖² - (Δ_θ f)²/(d-1)`` on the sphere factor of the cylinder."""
    j = cyl_jet(f, np.asarray(p, dtype=float), rel_step)
    m = j.g_th.shape[-1]
    return j.hess_th_norm_sq - j.lap_th**2 / m


# ---------------------------------------------------------------------------
# curvature tensors in the cylindrical chart


def _hj(chart, y):
    y = np.asarray(y, dtype=float)
    h = chart.h_diag(y)[..., :, None] * np.eye(chart.dim)
    j = np.zeros_like(h)
    j[..., 0, 0] = 1.0
    return h, j


def _mat(x):
    """Scalar or batch of scalars as a broadcastable stack of 1x1 matrices."""
    return np.asarray(x, dtype=float)[..., None, None]


def ricci_metric_closed(chart, y):
    """``Ric_ḡ`` from its closed form in ``j`` and ``h - j``."""
    y = np.asarray(y, dtype=float)
    h, j = _hj(chart, y)
    d = chart.d
    a2 = _mat(chart.alpha**2)
    phi2 = _mat(chart.phi(y[..., 0]) ** 2)
    return (d - 1) * a2 / phi2 * j + ((d - 2) * (1 - a2) * phi2 + (d - 1) * a2) / phi2 * (h - j)


def hess_weight_closed(chart, y):
    """``∇∇W̄`` from its closed form."""
    y = np.asarray(y, dtype=float)
    h, j = _hj(chart, y)
    a2 = _mat(chart.alpha**2)
    nd = _mat(chart.n - chart.d)
    phi2 = _mat(chart.phi(y[..., 0]) ** 2)
    return nd * a2 * j + nd * a2 * (1 - phi2) / phi2 * (h - j)


def ricci_generator_closed(chart, y):
    """``Ric(L̄) = Ric_ḡ + ∇∇W̄`` in the combined closed form."""
    y = np.asarray(y, dtype=float)
    h, j = _hj(chart, y)
    d = chart.d
    a2 = _mat(chart.alpha**2)
    nn = _mat(chart.n)
    phi2 = _mat(chart.phi(y[..., 0]) ** 2)
    b = (d - 2) - (nn - 2) * a2
    return a2 / phi2 * (d - 1 + phi2 * (nn - d)) * j + (a2 * (nn - 1) + phi2 * b) / phi2 * (h - j)


def cd_tensor_closed(chart, y):
    """``Ric(L̄) - ρḡ - dW̄⊗dW̄/(n-d)`` from closed forms (weight term dropped at n = d)."""
    y = np.asarray(y, dtype=float)
    alpha, n, d = chart.alpha, chart.n, chart.d
    rho = _mat(alpha**2 * (n - 1))
    t = ricci_generator_closed(chart, y) - rho * chart.metric_lower(y)
    # dW̄ = (n - d) α tanh(α s) ds, so dW̄⊗dW̄/(n-d) = (n - d) (α tanh)^2 j
    t[..., 0, 0] -= (n - d) * (alpha * np.tanh(alpha * y[..., 0])) ** 2
    return t


def cd_tensor_fd(chart, y, rel_step=DEFAULT_REL_STEP):
    """Same tensor with ``Ric_ḡ``, ``∇∇W̄`` and ``dW̄`` from finite-difference oracles."""
    y = np.asarray(y, dtype=float)
    dom = chart.contains
    mj = MetricJet(chart.metric_lower, y, rel_step, dom)
    alpha, n, d = chart.alpha, chart.n, chart.d
    rho = _mat(alpha**2 * (n - 1))
    t = mj.ricci() + mj.covariant_hessian(chart.weight, rel_step, dom) - rho * mj.g
    nd = np.asarray(n - d, dtype=float)
    if np.any(nd > 0):
        dw = fd_gradient(chart.weight, y, rel_step, dom)
        safe = np.where(nd > 0, nd, 1.0)
        coef = _mat(np.where(nd > 0, 1 / safe, 0.0))
        t = t - coef * dw[..., :, None] * dw[..., None, :]
    return sym_matrix(t)


def _h_scaled(t, chart, y):
    """``h^{-1/2} t h^{-1/2}`` for the diagonal ``h``."""
    hd = np.sqrt(chart.h_diag(y))
    return t / (hd[..., :, None] * hd[..., None, :])


@dataclass
class CdReport:
    params: object
    pointwise_min_eigenvalue: float
    cd_holds: bool
    integrated_residual: float
    max_residual: float
    max_residual_closed: float
    b_dgz: float
    notes: list = field(default_factory=list)


CD_TOL = 1e-8


def _cd_batch(chart, y, b_dgz, rel_step):
    """Residuals and eigenvalues for ``y`` with batch axes matching ``chart`` arrays."""
    h, j = _hj(chart, y)
    target = _mat(b_dgz) * (h - j)
    t_closed = cd_tensor_closed(chart, y)
    t_fd = cd_tensor_fd(chart, y, rel_step)
    res_fd = np.max(np.abs(_h_scaled(t_fd - target, chart, y)), axis=(-2, -1))
    res_closed = np.max(np.abs(_h_scaled(t_closed - target, chart, y)), axis=(-2, -1))
    eig = np.linalg.eigvalsh(sym_matrix(_h_scaled(t_closed, chart, y)))[..., 0]
    return res_fd, res_closed, eig


def default_cd_samples(d, count=8, seed=0):
    return sample_cylinder(d, count, seed, s_range=(-2.5, 2.5), margin=0.2)


def cd_tensor_check(params, samples=None, rel_step=DEFAULT_REL_STEP, integrated=True):
    """Compare the curvature-dimension tensor with ``B_DGZ (h - j)``.

    ``pointwise_min_eigenvalue`` is the smallest eigenvalue of
    ``Ric(L̄) - ρḡ - dW̄⊗dW̄/(n-d)`` relative to ``h``, minimized over the
    samples; it equals ``min(0, B_DGZ)``.  ``max_residual`` is the largest
    entry of ``h^{-1/2} (T - B_DGZ (h-j)) h^{-1/2}`` with ``T`` from the
    finite-difference oracles.
    """
    if not params.n_is_finite or params.alpha <= 0:
        raise DegenerateParams("cd_tensor_check needs finite n and alpha > 0")
    if params.n < params.d - 1e-12:
        raise DegenerateParams("n must be at least d")
    chart = CylChart(params)
    y = default_cd_samples(params.d) if samples is None else np.asarray(samples, dtype=float)
    res_fd, res_closed, eig = _cd_batch(chart, y, params.b_dgz, rel_step)
    min_eig = float(np.min(eig))
    integ = integrated_cd_residual(params) if integrated else float("nan")
    return CdReport(params=params, pointwise_min_eigenvalue=min_eig,
                    cd_holds=bool(min_eig >= -CD_TOL), integrated_residual=integ,
                    max_residual=float(np.max(res_fd)),
                    max_residual_closed=float(np.max(res_closed)), b_dgz=params.b_dgz)


def cd_grid_check(d, param_list, samples=None, rel_step=DEFAULT_REL_STEP):
    """Vectorized :func:`cd_tensor_check` over many parameter sets of one dimension."""
    if not param_list:
        return []
    y = default_cd_samples(d) if samples is None else np.asarray(samples, dtype=float)
    alpha = np.array([p.alpha for p in param_list])[:, None]
    n = np.array([p.n for p in param_list])[:, None]
    b = np.array([p.b_dgz for p in param_list])[:, None]
    chart = CylChart(param_list[0], alpha=alpha, n=n)
    chart.d = d
    yy = np.broadcast_to(y[None], (len(param_list),) + y.shape)
    res_fd, res_closed, eig = _cd_batch(chart, yy, b, rel_step)
    reports = []
    for i, p in enumerate(param_list):
        me = float(np.min(eig[i]))
        reports.append(CdReport(params=p, pointwise_min_eigenvalue=me, cd_holds=bool(me >= -CD_TOL),
                                integrated_residual=float("nan"),
                                max_residual=float(np.max(res_fd[i])),
                                max_residual_closed=float(np.max(res_closed[i])),
                                b_dgz=p.b_dgz))
    return reports


def integrated_cd_residual(params, amplitude=0.1, s_panels_refine=1, polar_nodes=24):
    """Integrated CD functional ``∫(Γ̄₂ - ρΓ̄ - (L̄f)²/n) f^{1-n} dμ̄ / (ε² Z)``.

    The probe is ``f = 1 + ε ω_1 / cosh(α s)``, which depends on ``s`` and
    the first polar angle only, so the remaining angles are integrated
    exactly.  The value is nonnegative inside the Felli-Schneider region.
    """
    chart = CylChart(params)
    d, alpha, n = params.d, params.alpha, params.n
    eps = amplitude

    def probe(y):
        return 1 + eps * np.cos(y[..., 1]) / np.cosh(alpha * y[..., 0])

    s_max = quadrature.s_cutoff(alpha, n)
    panels = int(math.ceil(2 * s_max * alpha)) * s_panels_refine
    s, ws = quadrature.panel_rule(-s_max, s_max, panels)
    ex = (d - 3) / 2
    t, wt = roots_jacobi(polar_nodes, ex, ex)
    th1 = np.arccos(t)
    rest = np.full(d - 2, np.pi / 2)
    rest[-1] = 1.0  # generic azimuth
    grid = np.empty((s.size, th1.size, d))
    grid[..., 0] = s[:, None]
    grid[..., 1] = th1[None, :]
    grid[..., 2:] = rest
    lhs, _ = cd_decomposition_terms(chart, probe, grid)
    phi = chart.phi(grid[..., 0])
    integrand = lhs * phi**4 * probe(grid) ** (1 - n) * phi ** (-n)
    other = quadrature.sphere_area(d - 1)
    total = np.sum(integrand * ws[:, None] * wt[None, :]) * other
    z = quadrature.normalization_Z(params)
    return float(total / (eps**2 * z))


# ---------------------------------------------------------------------------
# sphere Γ₂ inequality


def a_constant_printed(n, d):
    return (n - 1) * (n * (4 * d - 5) + 3 * (4 * d + 7)) / (4 * (d + 1) ** 2)


def a_constant_derived(n, d):
    """``A`` from the general weighted Γ₂ estimate with ``q = 1-n``, ``m = d-1``.

    ``χ = 3q / (2(m+2))`` cancels the ``Γ(h, Γ(h))`` term.
    """
    q, m = 1 - n, d - 1
    chi = 3 * q / (2 * (m + 2))
    return q * (q - 1) / (m - 1) - chi**2 - 2 * chi * (q - 1) / (m - 1)


def a_constant_b_coefficient(n, d):
    """Coefficient of ``Γ(h, Γ(h))`` for the same ``χ``; zero by construction."""
    q, m = 1 - n, d - 1
    chi = 3 * q / (2 * (m + 2))
    return (1.5 * q - chi * (m + 2)) / (m - 1)


@dataclass(frozen=True)
class AConstantReport:
    n: float
    d: int
    printed: float
    derived: float
    b_coefficient: float

    @property
    def mismatch(self):
        return abs(self.printed - self.derived)

    @property
    def agree(self):
        return self.mismatch <= 1e-12 * max(1.0, abs(self.printed))


def a_constant_report(n, d):
    return AConstantReport(n=n, d=d, printed=a_constant_printed(n, d),
                           derived=a_constant_derived(n, d),
                           b_coefficient=a_constant_b_coefficient(n, d))


def resolve_a_constant(n, d, source=None):
    """Return the ``A`` constant, refusing to choose when the two formulas disagree.

    ``source`` may be ``"printed"`` or ``"derived"`` to pick one explicitly.
    """
    rep = a_constant_report(n, d)
    if source == "printed":
        return rep.printed
    if source == "derived":
        return rep.derived
    if source is not None:
        raise ValueError(f"unknown A source {source!r}")
    if not rep.agree:
        raise ConstantMismatch(
            f"A constant disagrees at n={n}, d={d}: closed formula {rep.printed!r} "
            f"vs re-derivation {rep.derived!r}", rep)
    return rep.derived


def sphere_gamma2(d, f_theta, p, rel_step=DEFAULT_REL_STEP):
    """Round-sphere ``Γ₂(f) = ‖∇∇f‖² + (d-2) Γ(f)`` on ``S^{d-1}``."""
    p = np.asarray(p, dtype=float)
    grad = fd_gradient(f_theta, p, rel_step)
    hess = sym_matrix(fd_hessian(f_theta, p, rel_step))
    hess = hess - np.einsum("...cab,...c->...ab", sphere_christoffel(p), grad)
    g = sphere_metric_diag(p)
    inv = 1 / g
    hs = np.einsum("...a,...b,...ab,...ab->...", inv, inv, hess, hess)
    gam = np.sum(grad**2 * inv, axis=-1)
    return hs + (d - 2) * gam, gam


def sphere_gamma2_inequality(params, f_theta, A=None, a_source=None, m=12,
                             rel_step=DEFAULT_REL_STEP):
    """Both sides of the weighted ``Γ₂`` estimate on one sphere slice.

    Evaluates ``lhs = ∫ Γ₂^θ(f) f^{1-n} dθ`` and
    ``rhs = (d-1) ∫ Γ^θ(f) f^{1-n} dθ + A ∫ Γ^θ(f)² f^{-1-n} dθ`` over
    ``S^{d-1}``.  The common factor ``∫ φ^{4-n} ds`` is omitted (it
    diverges when ``n <= 4``), so this is the estimate at fixed ``s``.

    Raises
    ------
    ConstantMismatch
        When ``A`` is not given and the two formulas for it disagree.
    PositivityError
        When ``f`` is not positive at some node.
    """
    d, n = params.d, params.n
    if A is None:
        A = resolve_a_constant(n, d, a_source)
    angles, weights = quadrature.sphere_rule(d, m)
    vals = np.asarray(f_theta(angles), dtype=float)
    if np.min(vals) <= 0:
        raise PositivityError("f must be positive on the sphere")
    g2, gam = sphere_gamma2(d, f_theta, angles, rel_step)
    w = weights * vals ** (1 - n)
    lhs = float(np.sum(g2 * w))
    rhs = float(np.sum(((d - 1) * gam + A * gam**2 / vals**2) * w))
    return lhs, rhs, A


def sphere_field_from_unit(func):
    """Lift ``func(ω)`` on unit vectors to a function of iterated polar angles."""
    return lambda theta: func(sphere_from_angles(theta))
