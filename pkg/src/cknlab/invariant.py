"""The one-parameter family of n-conformal invariants of a weighted manifold.

For a triple ``(g, μ = e^{-W} dV_g)`` of dimension ``d`` and ``n > d``::

    S_γ = θ (sc_g - γ Δ_g W + β Γ(W))
    β = (γ(n - 2d + 2) - 2(d - 1)) / (2(n - d))
    θ = (n - 2) / (4(d - 1) - 2γ(n - d))

Under ``μ -> c^{-n} μ``, ``Γ -> c² Γ`` (``c = e^τ``) it transforms as
``S -> c² [S + (n-2)/2 (Lτ - (n-2)/2 Γ(τ))]`` with ``L = Δ_g - Γ(W, ·)``.
Curvature and derivatives of ``W`` and ``τ`` come from finite differences
of the stored metric and weight fields.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import ModelKind
from .diffgeo import MetricJet, fd_gradient
from .errors import BoundaryError, DegenerateParams, PoleError

# curvature needs second differences of the metric; far from the origin the
# roundoff of the default step is amplified by g^{-1} g^{-1}, so use a larger one
INVARIANT_REL_STEP = 5e-3
SYSTEM_TOL = 1e-12


@dataclass(frozen=True)
class InvariantCoeffs:
    gamma: float
    n: float
    d: int
    beta: float
    theta: float

    def system_residuals(self):
        """Residuals of the three linear conditions making ``S_γ`` an invariant."""
        g, n, d, b, t = self.gamma, self.n, self.d, self.beta, self.theta
        return np.array([
            t * (2 * (d - 1) - g * (n - d)) - (n - 2) / 2,
            t * (b * (n - d) ** 2 - (d - 1) * (d - 2) + g * (d - 2) * (n - d)) + (n - 2) ** 2 / 4,
            t * (g * (d - 2) + 2 * b * (n - d)) + (n - 2) / 2,
        ])


def coeffs(gamma, n, d):
    """``β_n(γ)`` and ``θ_n(γ)``; refuses ``n <= d`` and the pole of ``θ``."""
    if not math.isfinite(n) or n <= d:
        raise DegenerateParams(f"the invariant needs finite n > d, got n={n}, d={d}")
    denom = 4 * (d - 1) - 2 * gamma * (n - d)
    if abs(denom) <= 1e-14 * max(1.0, abs(gamma) * (n - d)):
        raise PoleError(f"theta has a pole at gamma={gamma}")
    beta = (gamma * (n - 2 * d + 2) - 2 * (d - 1)) / (2 * (n - d))
    return InvariantCoeffs(gamma=float(gamma), n=float(n), d=int(d), beta=beta,
                           theta=(n - 2) / denom)


def theta_pole(n, d):
    """The value of ``γ`` at which ``θ_n`` blows up."""
    return 2 * (d - 1) / (n - d)


@dataclass(frozen=True)
class WeightedTriple:
    """A weighted manifold in coordinates: lower metric field, weight field, ``n``."""

    metric: Callable
    weight: Callable
    n: float
    d: int
    domain: Callable = None

    def check(self, y):
        if self.domain is not None and not np.all(self.domain(np.asarray(y))):
            raise BoundaryError("point outside the domain of the triple")


def triple_of(space):
    """View a model space (or chart) as a :class:`WeightedTriple`."""
    return WeightedTriple(metric=space.metric_lower, weight=space.weight,
                          n=space.params.n, d=space.params.d, domain=space.contains)


def conformal_triple(triple, tau):
    """``(c^{-n} μ, c² Γ)`` with ``c = e^τ``: metric ``g/c²``, weight ``W + (n-d)τ``."""
    n, d = triple.n, triple.d

    def metric(y):
        return triple.metric(y) * np.exp(-2 * np.asarray(tau(y)))[..., None, None]

    def weight(y):
        return triple.weight(y) + (n - d) * tau(y)

    return WeightedTriple(metric=metric, weight=weight, n=n, d=d, domain=triple.domain)


@dataclass(frozen=True)
class InvariantParts:
    scalar_curvature: np.ndarray
    laplacian_weight: np.ndarray
    gamma_weight: np.ndarray

    def combine(self, c):
        return c.theta * (self.scalar_curvature - c.gamma * self.laplacian_weight
                          + c.beta * self.gamma_weight)


def _as_triple(obj):
    return obj if isinstance(obj, WeightedTriple) else triple_of(obj)


def invariant_parts(space, y, rel_step=INVARIANT_REL_STEP):
    """``sc_g``, ``Δ_g W`` and ``Γ(W)`` at ``y``."""
    t = _as_triple(space)
    y = np.asarray(y, dtype=float)
    t.check(y)
    jet = MetricJet(t.metric, y, rel_step, t.domain)
    return InvariantParts(scalar_curvature=jet.scalar_curvature(),
                          laplacian_weight=jet.laplace_beltrami(t.weight, rel_step, t.domain),
                          gamma_weight=jet.carre_du_champ(t.weight, rel_step=rel_step,
                                                          domain=t.domain))


def s_gamma(space, gamma, y, rel_step=INVARIANT_REL_STEP):
    """``S_γ`` of a model space, chart or :class:`WeightedTriple` at ``y``."""
    t = _as_triple(space)
    c = coeffs(gamma, t.n, t.d)
    return invariant_parts(t, y, rel_step).combine(c)


def expected_s_gamma0(kind, params):
    """Constant value of ``S_{γ0}`` on the three model spaces."""
    kind = ModelKind.parse(kind)
    base = params.n * (params.n - 2) * params.alpha**2 / 4
    return {ModelKind.EUCLIDEAN: 0.0, ModelKind.SPHERICAL: base,
            ModelKind.HYPERBOLIC: -base}[kind]


def euclidean_parts_closed(params, x):
    """Closed forms of ``sc``, ``ΔW`` and ``Γ(W)`` on the Euclidean CKN space."""
    n, d, alpha = params.n, params.d, params.alpha
    r2a = np.linalg.norm(np.asarray(x, dtype=float), axis=-1) ** (-2 * alpha)
    return InvariantParts(scalar_curvature=r2a * (d - 1) * (d - 2) * (1 - alpha**2),
                          laplacian_weight=-r2a * (d - 2) * alpha**2 * (n - d),
                          gamma_weight=r2a * alpha**2 * (n - d) ** 2)


def _lap_and_gammas(triple, tau, y, rel_step):
    jet = MetricJet(triple.metric, y, rel_step, triple.domain)
    lap = jet.laplace_beltrami(tau, rel_step, triple.domain)
    d_tau = fd_gradient(tau, y, rel_step, triple.domain)
    d_w = fd_gradient(triple.weight, y, rel_step, triple.domain)
    g_tau = np.einsum("...ij,...i,...j->...", jet.g_inv, d_tau, d_tau)
    g_w_tau = np.einsum("...ij,...i,...j->...", jet.g_inv, d_w, d_tau)
    return lap, g_tau, g_w_tau


def transformation_law_residual(space, gamma, tau, y, rel_step=INVARIANT_REL_STEP):
    """``|S(c^{-n}μ, c²Γ) - c²[S + (n-2)/2 (Lτ - (n-2)/2 Γ(τ))]|`` at ``y``."""
    t = _as_triple(space)
    y = np.asarray(y, dtype=float)
    t.check(y)
    n = t.n
    lhs = s_gamma(conformal_triple(t, tau), gamma, y, rel_step)
    s = s_gamma(t, gamma, y, rel_step)
    lap, g_tau, g_w_tau = _lap_and_gammas(t, tau, y, rel_step)
    l_tau = lap - g_w_tau
    rhs = np.exp(2 * np.asarray(tau(y))) * (s + (n - 2) / 2 * (l_tau - (n - 2) / 2 * g_tau))
    return np.abs(lhs - rhs)


def yamabe_residual(space, gamma, tau, y, rel_step=INVARIANT_REL_STEP):
    """``|-Lu + s u - s̃ u^{(n+2)/(n-2)}|`` with ``u = e^{-(n-2)τ/2}``."""
    t = _as_triple(space)
    y = np.asarray(y, dtype=float)
    t.check(y)
    n = t.n
    k = (n - 2) / 2

    def u(z):
        return np.exp(-k * np.asarray(tau(z)))

    s = s_gamma(t, gamma, y, rel_step)
    s_new = s_gamma(conformal_triple(t, tau), gamma, y, rel_step)
    lap, _, g_w_u = _lap_and_gammas(t, u, y, rel_step)
    uy = u(y)
    return np.abs(-(lap - g_w_u) + s * uy - s_new * uy ** ((n + 2) / (n - 2)))
