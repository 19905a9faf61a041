"""Finite differences, Riemannian curvature oracles and conformal-change formulas.

Conventions
-----------
Points are arrays whose last axis holds coordinates; every leading axis is
a batch axis.  A field ``f`` maps an array of shape ``(..., D)`` to shape
``(...)`` (scalar field) or ``(...) + out_shape`` (tensor field, e.g. a
metric returning ``(..., D, D)``).  Derivative axes are appended after the
output axes.

Metrics are stored with lower indices.  A conformal change multiplies the
*upper-index* metric by ``c**2``, so the lower-index metric is divided by
``c**2``; ``tau = log c``.

All stencils are fourth order and Richardson-extrapolated once (steps
``h`` and ``h/2``), with ``h = rel_step * max(1, |y_k|)`` per coordinate.
"""

import numpy as np

from .errors import BoundaryError, DomainError

DEFAULT_REL_STEP = 1e-3

_D1_OFFSETS = (-2, -1, 1, 2)
_D1_COEFFS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D2_COEFFS = np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0  # matches _D1_OFFSETS


def steps(y, rel_step=DEFAULT_REL_STEP):
    return rel_step * np.maximum(1.0, np.abs(y))


def _evaluate(f, y, shifts, domain):
    pts = y[None] + shifts
    if domain is not None and not np.all(domain(pts)):
        raise BoundaryError("finite-difference stencil leaves the domain")
    return np.asarray(f(pts), dtype=float)


def _expand(h, out_ndim):
    return h.reshape(h.shape + (1,) * out_ndim)


def _gradient_raw(f, y, h, domain):
    dim = y.shape[-1]
    shifts = np.zeros((1 + 4 * dim,) + y.shape)
    for k in range(dim):
        for j, o in enumerate(_D1_OFFSETS):
            shifts[1 + 4 * k + j, ..., k] = o * h[..., k]
    vals = _evaluate(f, y, shifts, domain)
    # differences against the center cancel exactly along directions f ignores
    center = vals[0]
    diffs = (vals[1:] - center[None]).reshape((dim, 4) + center.shape)
    out_ndim = center.ndim - (y.ndim - 1)
    comps = [np.tensordot(_D1_COEFFS, diffs[k], axes=(0, 0)) / _expand(h[..., k], out_ndim)
             for k in range(dim)]
    return np.stack(comps, axis=-1)


def _hessian_raw(f, y, h, domain):
    dim = y.shape[-1]
    pairs = [(k, l) for k in range(dim) for l in range(k + 1, dim)]
    n_shift = 1 + 4 * dim + 16 * len(pairs)
    shifts = np.zeros((n_shift,) + y.shape)
    idx = 1
    for k in range(dim):
        for o in _D1_OFFSETS:
            shifts[idx, ..., k] = o * h[..., k]
            idx += 1
    for k, l in pairs:
        for ok in _D1_OFFSETS:
            for ol in _D1_OFFSETS:
                shifts[idx, ..., k] = ok * h[..., k]
                shifts[idx, ..., l] = ol * h[..., l]
                idx += 1
    vals = _evaluate(f, y, shifts, domain)
    out_ndim = vals.ndim - 1 - (y.ndim - 1)
    center = vals[0]
    axis = vals[1:1 + 4 * dim].reshape((dim, 4) + center.shape) - center[None, None]
    hess = np.empty(center.shape + (dim, dim))
    for k in range(dim):
        hk = _expand(h[..., k], out_ndim)
        hess[..., k, k] = np.tensordot(_D2_COEFFS, axis[k], axes=(0, 0)) / hk**2
    base = 1 + 4 * dim
    for m, (k, l) in enumerate(pairs):
        block = vals[base + 16 * m: base + 16 * (m + 1)].reshape((4, 4) + center.shape)
        # f(k, l) - f(k, 0) - f(0, l) + f(0, 0); the subtracted terms sum to zero
        mixed = block - center[None, None] - axis[k][:, None] - axis[l][None, :]
        hk = _expand(h[..., k], out_ndim)
        hl = _expand(h[..., l], out_ndim)
        inner = np.tensordot(_D1_COEFFS, mixed, axes=(0, 1))
        v = np.tensordot(_D1_COEFFS, inner, axes=(0, 0)) / (hk * hl)
        hess[..., k, l] = v
        hess[..., l, k] = v
    return hess


def fd_gradient(f, y, rel_step=DEFAULT_REL_STEP, domain=None):
    """Gradient of ``f`` at ``y`` (last axis of the result indexes coordinates)."""
    y = np.asarray(y, dtype=float)
    h = steps(y, rel_step)
    coarse = _gradient_raw(f, y, h, domain)
    fine = _gradient_raw(f, y, h / 2, domain)
    return (16 * fine - coarse) / 15


def fd_hessian(f, y, rel_step=DEFAULT_REL_STEP, domain=None):
    """Coordinate Hessian of ``f`` at ``y`` (two trailing derivative axes)."""
    y = np.asarray(y, dtype=float)
    h = steps(y, rel_step)
    coarse = _hessian_raw(f, y, h, domain)
    fine = _hessian_raw(f, y, h / 2, domain)
    return (16 * fine - coarse) / 15


# ---------------------------------------------------------------------------
# symmetric matrices


def sym_matrix(m, check_pd=False, tol=0.0):
    """Symmetrize a stack of square matrices; optionally require positive definiteness."""
    m = np.asarray(m, dtype=float)
    out = 0.5 * (m + np.swapaxes(m, -1, -2))
    if check_pd and np.any(np.linalg.eigvalsh(out)[..., 0] <= tol):
        raise DomainError("matrix is not positive definite")
    return out


def hs_norm_sq(t, g_inv):
    """Squared Hilbert-Schmidt norm of a lower-index 2-tensor."""
    return np.einsum("...ik,...jl,...ij,...kl->...", g_inv, g_inv, t, t)


def sym_product(u, v):
    """Symmetrized tensor product (u ⊗ v + v ⊗ u) / 2 of covectors."""
    return 0.5 * (u[..., :, None] * v[..., None, :] + v[..., :, None] * u[..., None, :])


# ---------------------------------------------------------------------------
# curvature oracles from a lower-index metric field


class MetricJet:
    """Metric with first and second coordinate derivatives at a batch of points.

    ``dg[..., i, j, k] = ∂_k g_ij`` and ``ddg[..., i, j, k, l] = ∂_k ∂_l g_ij``.
    """

    def __init__(self, metric, y, rel_step=DEFAULT_REL_STEP, domain=None):
        y = np.asarray(y, dtype=float)
        self.y = y
        self.g = np.asarray(metric(y), dtype=float)
        self.dg = fd_gradient(metric, y, rel_step, domain)
        self.ddg = fd_hessian(metric, y, rel_step, domain)
        self.g_inv = np.linalg.inv(self.g)

    @property
    def dim(self):
        return self.g.shape[-1]

    def christoffel_first(self):
        dg = self.dg
        return 0.5 * (np.einsum("...ljk->...lkj", dg) + dg - np.einsum("...kjl->...ljk", dg))

    def christoffel(self):
        """Γ^k_ij with index layout ``[..., k, i, j]``."""
        return np.einsum("...kl,...lij->...kij", self.g_inv, self.christoffel_first())

    def ricci(self):
        g_inv, dg, ddg = self.g_inv, self.dg, self.ddg
        first = self.christoffel_first()
        gam = np.einsum("...kl,...lij->...kij", g_inv, first)
        # ∂_m of the first-kind symbols, layout [..., l, i, j, m]
        d_first = 0.5 * (np.einsum("...ljim->...lijm", ddg)
                         + np.einsum("...lijm->...lijm", ddg)
                         - np.einsum("...ijlm->...lijm", ddg))
        d_ginv = -np.einsum("...ka,...abm,...bl->...klm", g_inv, dg, g_inv)
        d_gam = (np.einsum("...klm,...lij->...kijm", d_ginv, first)
                 + np.einsum("...kl,...lijm->...kijm", g_inv, d_first))
        ric = (np.einsum("...rnsr->...sn", d_gam)
               - np.einsum("...rrsn->...sn", d_gam)
               + np.einsum("...rrl,...lns->...sn", gam, gam)
               - np.einsum("...rnl,...lrs->...sn", gam, gam))
        return sym_matrix(ric)

    def scalar_curvature(self):
        return np.einsum("...ij,...ij->...", self.g_inv, self.ricci())

    def covariant_hessian(self, f, rel_step=DEFAULT_REL_STEP, domain=None):
        hess = fd_hessian(f, self.y, rel_step, domain)
        grad = fd_gradient(f, self.y, rel_step, domain)
        return sym_matrix(hess - np.einsum("...kij,...k->...ij", self.christoffel(), grad))

    def laplace_beltrami(self, f, rel_step=DEFAULT_REL_STEP, domain=None):
        return np.einsum("...ij,...ij->...", self.g_inv, self.covariant_hessian(f, rel_step, domain))

    def carre_du_champ(self, f, g=None, rel_step=DEFAULT_REL_STEP, domain=None):
        df = fd_gradient(f, self.y, rel_step, domain)
        dh = df if g is None else fd_gradient(g, self.y, rel_step, domain)
        return np.einsum("...ij,...i,...j->...", self.g_inv, df, dh)


# ---------------------------------------------------------------------------
# conformal change g^{ij} -> c^2 g^{ij}


def conformal_laplacian(lap_g_f, gamma_g_tau_f, c, d):
    """Laplace-Beltrami operator of the new metric applied to f."""
    return c**2 * (lap_g_f - (d - 2) * gamma_g_tau_f)


def conformal_hessian(hess_g_psi, dpsi, dtau, gamma_g_psi_tau, g):
    """Hessian of psi in the new metric (lower indices)."""
    hess = (hess_g_psi + 2 * sym_product(dpsi, dtau)
            - np.asarray(gamma_g_psi_tau)[..., None, None] * g)
    return sym_matrix(hess)


def conformal_hessian_hs_norm(hs_g_psi, gamma_g_tau_gamma_psi, gamma_g_psi, gamma_g_tau,
                              gamma_g_psi_tau, lap_g_psi, c, d):
    """Squared Hilbert-Schmidt norm, in the new metric, of the new Hessian of psi.

    Every carré du champ in the bracket is taken in the *old* metric,
    including the mixed term Γ(τ, Γ(ψ)).
    """
    return c**4 * (hs_g_psi + 2 * gamma_g_tau_gamma_psi + 2 * gamma_g_psi * gamma_g_tau
                   + (d - 2) * gamma_g_psi_tau**2 - 2 * lap_g_psi * gamma_g_psi_tau)


def conformal_ricci(ric_g, lap_g_tau, hess_g_tau, dtau, gamma_g_tau, g, d):
    """Ricci tensor of the new metric (lower indices)."""
    lap = np.asarray(lap_g_tau)[..., None, None]
    gt = np.asarray(gamma_g_tau)[..., None, None]
    ric = ric_g + lap * g + (d - 2) * (hess_g_tau + dtau[..., :, None] * dtau[..., None, :] - gt * g)
    return sym_matrix(ric)


def conformal_scalar(sc_g, lap_g_tau, gamma_g_tau, c, d):
    """Scalar curvature of the new metric."""
    return c**2 * (sc_g + (d - 1) * (2 * lap_g_tau - (d - 2) * gamma_g_tau))


def _rel(a, b, matrix=False):
    """Error relative to the oracle magnitude, with a unit floor."""
    a, b = np.asarray(a), np.asarray(b)
    if matrix:
        err = np.max(np.abs(a - b), axis=(-2, -1))
        scale = np.max(np.abs(b), axis=(-2, -1))
    else:
        err, scale = np.abs(a - b), np.abs(b)
    return err / np.maximum(1.0, scale)


def conformal_change_residuals(metric, tau, psi, y, rel_step=DEFAULT_REL_STEP, domain=None):
    """Each conformal-change formula against the direct oracle of the new metric.

    The new metric is ``metric / c²`` with ``c = e^τ``.  Returns relative
    errors (unit floor) keyed by ``scalar``, ``laplacian``, ``hessian``,
    ``hessian_hs_norm``, ``ricci`` and ``trace`` (``h``-trace of the new
    Ricci tensor against the new scalar curvature).
    """
    y = np.asarray(y, dtype=float)
    d = y.shape[-1]
    old = MetricJet(metric, y, rel_step, domain)

    def new_metric(z):
        return metric(z) * np.exp(-2 * np.asarray(tau(z)))[..., None, None]

    new = MetricJet(new_metric, y, rel_step, domain)
    c = np.exp(np.asarray(tau(y)))
    g, g_inv = old.g, old.g_inv
    dtau = fd_gradient(tau, y, rel_step, domain)
    dpsi = fd_gradient(psi, y, rel_step, domain)
    gam_tau = np.einsum("...ij,...i,...j->...", g_inv, dtau, dtau)
    gam_psi = np.einsum("...ij,...i,...j->...", g_inv, dpsi, dpsi)
    gam_pt = np.einsum("...ij,...i,...j->...", g_inv, dpsi, dtau)
    hess_tau = old.covariant_hessian(tau, rel_step, domain)
    hess_psi = old.covariant_hessian(psi, rel_step, domain)
    lap_tau = np.einsum("...ij,...ij->...", g_inv, hess_tau)
    lap_psi = np.einsum("...ij,...ij->...", g_inv, hess_psi)
    ric_g = old.ricci()

    def gamma_psi_field(z):
        return MetricJet(metric, z, rel_step, domain).carre_du_champ(psi, rel_step=rel_step,
                                                                     domain=domain)

    d_gam_psi = fd_gradient(gamma_psi_field, y, rel_step, domain)
    tau_gam_psi = np.einsum("...ij,...i,...j->...", g_inv, dtau, d_gam_psi)

    sc_new = new.scalar_curvature()
    sc_formula = conformal_scalar(old.scalar_curvature(), lap_tau, gam_tau, c, d)
    ric_new = new.ricci()
    ric_formula = conformal_ricci(ric_g, lap_tau, hess_tau, dtau, gam_tau, g, d)
    hess_new = new.covariant_hessian(psi, rel_step, domain)
    hess_formula = conformal_hessian(hess_psi, dpsi, dtau, gam_pt, g)
    hs_new = hs_norm_sq(hess_new, new.g_inv)
    hs_formula = conformal_hessian_hs_norm(hs_norm_sq(hess_psi, g_inv), tau_gam_psi, gam_psi,
                                           gam_tau, gam_pt, lap_psi, c, d)
    lap_new = new.laplace_beltrami(psi, rel_step, domain)
    lap_formula = conformal_laplacian(lap_psi, gam_pt, c, d)
    trace = np.einsum("...ij,...ij->...", new.g_inv, ric_formula)
    return {
        "scalar": _rel(sc_formula, sc_new),
        "laplacian": _rel(lap_formula, lap_new),
        "hessian": _rel(hess_formula, hess_new, matrix=True),
        "hessian_hs_norm": _rel(hs_formula, hs_new),
        "ricci": _rel(ric_formula, ric_new, matrix=True),
        "trace": _rel(trace, sc_formula),
    }
