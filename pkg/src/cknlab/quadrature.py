"""Deterministic quadrature on ``S^{d-1}`` and ``R × S^{d-1}``, and the constant Z.

The ``s`` direction uses 32-node Gauss-Legendre panels of width ``1/α`` on
``[-S, S]`` with ``cosh(α S)^{-(n-2)} < tail_tol``.  Each polar angle
``θ_k`` is integrated in ``t = cos θ_k``, where the Jacobian
``sin^{d-1-k} θ_k dθ_k`` becomes the Gauss-Jacobi weight
``(1 - t^2)^{(d-2-k)/2}``; the azimuth uses the periodic trapezoid rule.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .errors import DegenerateParams, NonFinite

PANEL_NODES = 32
DEFAULT_ANGULAR = 16
DEFAULT_TAIL_TOL = 1e-16
# number of s nodes evaluated per block when integrating
_S_BLOCK = 64


def sphere_area(d):
    """Surface area ``2 π^{d/2} / Γ(d/2)`` of the unit sphere in ``R^d``."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def sphere_rule(d, m=DEFAULT_ANGULAR):
    """Nodes (angles) and weights for the round measure on ``S^{d-1}``.

    Polar angles get ``m`` nodes each, the azimuth ``2m``.  Returns
    ``(angles, weights)`` with ``angles`` of shape ``(N, d-1)``.
    """
    if d < 2:
        raise DegenerateParams("sphere_rule needs d >= 2")
    axes, wts = [], []
    for k in range(1, d - 1):
        ex = (d - 2 - k) / 2
        t, w = special.roots_jacobi(m, ex, ex)
        # descending t gives ascending angle
        axes.append(np.arccos(t[::-1]))
        wts.append(w[::-1])
    n_az = 2 * m
    axes.append(2 * np.pi * (np.arange(n_az) + 0.5) / n_az)
    wts.append(np.full(n_az, 2 * np.pi / n_az))
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*wts, indexing="ij")
    angles = np.stack([g.ravel() for g in mesh], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
    return angles, weights


def s_cutoff(alpha, n, tail_tol=DEFAULT_TAIL_TOL):
    """Smallest ``S`` with ``cosh(α S)^{-(n-2)} <= tail_tol``."""
    return float(np.arccosh(tail_tol ** (-1.0 / (n - 2)))) / alpha


def panel_rule(lo, hi, panels, nodes=PANEL_NODES):
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


@dataclass(frozen=True)
class QuadGrid:
    """Product rule on ``R × S^{d-1}``; angular weights carry the round Jacobian."""

    d: int
    alpha: float
    n: float
    s_nodes: np.ndarray
    s_weights: np.ndarray
    angles: np.ndarray
    angle_weights: np.ndarray
    s_max: float
    panels: int
    angular_order: int

    @property
    def size(self):
        return self.s_nodes.size * self.angle_weights.size

    @property
    def resolution(self):
        return {"panels": self.panels, "panel_nodes": PANEL_NODES,
                "angular_order": self.angular_order, "s_max": self.s_max}


def build_grid(d, params, tail_tol=DEFAULT_TAIL_TOL, refine=1, m=DEFAULT_ANGULAR):
    """Grid for the spherical CKN space of ``params``.

    ``refine`` multiplies the number of ``s`` panels; ``m`` is the number
    of nodes per polar angle.
    """
    if not params.n_is_finite or params.alpha <= 0:
        raise DegenerateParams("build_grid needs finite n and alpha > 0")
    if d != params.d:
        raise DegenerateParams(f"grid dimension {d} differs from params.d={params.d}")
    alpha, n = params.alpha, params.n
    s_max = s_cutoff(alpha, n, tail_tol)
    panels = int(math.ceil(2 * s_max * alpha)) * int(refine)
    s_nodes, s_weights = panel_rule(-s_max, s_max, panels)
    angles, angle_weights = sphere_rule(d, m)
    return QuadGrid(d=d, alpha=alpha, n=n, s_nodes=s_nodes, s_weights=s_weights,
                    angles=angles, angle_weights=angle_weights, s_max=s_max,
                    panels=panels, angular_order=m)


def _log_cosh(x):
    t = np.abs(x)
    return t + np.log1p(np.exp(-2 * t)) - math.log(2.0)


def _density_factor(measure, grid, s, y):
    if callable(measure):
        return np.asarray(measure(y), dtype=float)
    if measure == "mu_bar":
        return np.exp(-grid.n * _log_cosh(grid.alpha * s))[:, None]
    if measure == "volume":
        return np.exp(-grid.d * _log_cosh(grid.alpha * s))[:, None]
    if measure == "lebesgue":
        return np.ones((s.size, 1))
    raise ValueError(f"unknown measure {measure!r}")


def integrate(f, grid, measure="mu_bar"):
    """Integrate ``f(y)``, ``y = (s, θ)``, against a density on the cylinder.

    ``measure`` is ``"mu_bar"`` (``φ^{-n} ds dθ``), ``"volume"``
    (``φ^{-d} ds dθ``), ``"lebesgue"`` (``ds dθ``) or a callable density
    with respect to ``ds dθ``.  If ``f`` returns an extra trailing axis,
    each component is integrated and an array is returned.
    """
    ang = grid.angles
    total = []
    for start in range(0, grid.s_nodes.size, _S_BLOCK):
        s = grid.s_nodes[start:start + _S_BLOCK]
        ws = grid.s_weights[start:start + _S_BLOCK]
        y = np.concatenate([np.broadcast_to(s[:, None, None], (s.size, ang.shape[0], 1)),
                            np.broadcast_to(ang[None], (s.size,) + ang.shape)], axis=-1)
        vals = np.asarray(f(y), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("integrand is not finite at some quadrature node")
        w = _density_factor(measure, grid, s, y) * (ws[:, None] * grid.angle_weights[None, :])
        if vals.ndim == 3:
            total.append(np.sum(vals * w[..., None], axis=(0, 1)))
        else:
            total.append(np.sum(vals * w))
    out = np.sum(np.array(total), axis=0)
    return float(out) if np.ndim(out) == 0 else out


def integrate_sphere(f, d, m=DEFAULT_ANGULAR):
    """Integrate ``f(θ)`` over ``S^{d-1}`` with the round measure."""
    angles, weights = sphere_rule(d, m)
    vals = np.asarray(f(angles), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("integrand is not finite at some quadrature node")
    return float(np.sum(vals * weights))


# ---------------------------------------------------------------------------
# normalization constant


def _check_z_params(params):
    if not params.n_is_finite or params.alpha <= 0 or params.n <= 1:
        raise DegenerateParams("Z needs alpha > 0 and finite n > 1")


def cosh_integral(n):
    """``∫_0^∞ cosh(t)^{-n} dt`` by adaptive quadrature."""
    val, _ = sp_integrate.quad(lambda t: np.exp(-n * _log_cosh(t)), 0, np.inf,
                               epsabs=0, epsrel=1e-13, limit=200)
    return val


def normalization_Z(params):
    """``Z = |S^{d-1}| ∫_R cosh(α t)^{-n} dt``, the total mass of the spherical measure."""
    _check_z_params(params)
    return sphere_area(params.d) * 2 * cosh_integral(params.n) / params.alpha


def attach_z(params):
    """Copy of ``params`` with Z filled in."""
    return params.with_z(normalization_Z(params))


def z_closed_form(alpha, n, d):
    """``|S^{d-1}| B(n/2, 1/2) / α``."""
    return sphere_area(d) * special.beta(n / 2, 0.5) / alpha


def z_footnote(params):
    """``(2/α) |S^{d-1}| ∫_0^∞ cosh(t)^{-n} dt``, evaluated independently."""
    _check_z_params(params)
    val, _ = sp_integrate.quad(lambda t: np.cosh(t) ** (-params.n), 0, 50,
                               epsabs=0, epsrel=1e-13, limit=200)
    return 2 / params.alpha * sphere_area(params.d) * val


def z_cartesian(params):
    """Z from the Cartesian density ``2^n |x|^{-bp} (1 + |x|^{2α})^{-n}``.

    Integrated radially after the substitution ``|x| = e^t``; the integrand
    is the raw Cartesian expression ``e^{t(d - bp)} 2^n (1 + e^{2αt})^{-n}``
    evaluated in log form, split at ``t = 0``.
    """
    _check_z_params(params)
    n, alpha, d = params.n, params.alpha, params.d
    bp = params.b * params.p

    def integrand(t):
        return np.exp(t * (d - bp) + n * (math.log(2.0) - np.logaddexp(0.0, 2 * alpha * t)))

    scale = 1.0 / alpha
    total = 0.0
    for lo, hi in ((-np.inf, -scale), (-scale, 0.0), (0.0, scale), (scale, np.inf)):
        val, _ = sp_integrate.quad(integrand, lo, hi, epsabs=0, epsrel=1e-13, limit=400)
        total += val
    return sphere_area(d) * total
