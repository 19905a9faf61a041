"""The three CKN model spaces in Cartesian coordinates and the cylindrical chart.

Each space is a diffusion ``L f = g^{ij} ∂_ij f + b^i ∂_i f`` given by its
upper-index metric, its drift ``b`` and a reference density with respect to
coordinate Lebesgue measure.  The drift always equals
``(1/ρ) ∂_j (ρ g^{ij})`` so that ``L`` is symmetric for the density ``ρ``.

Angles on the sphere are iterated polar angles ``θ_1, ..., θ_{d-2}`` in
``[0, π]`` followed by an azimuth ``ϕ`` in ``[0, 2π)``::

    x_1 = cos θ_1
    x_2 = sin θ_1 cos θ_2
    ...
    x_{d-1} = sin θ_1 ... sin θ_{d-2} cos ϕ
    x_d     = sin θ_1 ... sin θ_{d-2} sin ϕ
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParams, DomainError, OriginError

POLE_MARGIN = 1e-3


class ModelKind(enum.Enum):
    EUCLIDEAN = "EuclideanCKN"
    SPHERICAL = "SphericalCKN"
    HYPERBOLIC = "HyperbolicCKN"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name, kind.name.lower()):
                return kind
        raise ValueError(f"unknown model kind {value!r}")


# ---------------------------------------------------------------------------
# sphere coordinates


def sphere_from_angles(theta):
    """Unit vectors from iterated polar angles; ``theta`` has d-1 trailing entries."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1]
    out = np.empty(theta.shape[:-1] + (m + 1,))
    prod = np.ones(theta.shape[:-1])
    for k in range(m):
        out[..., k] = prod * np.cos(theta[..., k])
        prod = prod * np.sin(theta[..., k])
    out[..., m] = prod
    return out


def angles_from_sphere(omega):
    """Inverse of :func:`sphere_from_angles` (azimuth reduced to ``[0, 2π)``)."""
    omega = np.asarray(omega, dtype=float)
    dim = omega.shape[-1]
    theta = np.empty(omega.shape[:-1] + (dim - 1,))
    # tail[k] = |(omega_k, ..., omega_{d-1})|
    tail = np.sqrt(np.cumsum(omega[..., ::-1] ** 2, axis=-1))[..., ::-1]
    for k in range(dim - 2):
        theta[..., k] = np.arctan2(tail[..., k + 1], omega[..., k])
    theta[..., dim - 2] = np.mod(np.arctan2(omega[..., -1], omega[..., -2]), 2 * np.pi)
    return theta


def sphere_metric_diag(theta):
    """Diagonal of the round metric ``G_θ`` in iterated polar angles."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1]
    out = np.ones(theta.shape)
    for k in range(1, m):
        out[..., k] = out[..., k - 1] * np.sin(theta[..., k - 1]) ** 2
    return out


def sphere_drift(theta):
    """First-order coefficients of the round Laplacian ``Δ_θ``."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[-1]
    dim = m + 1
    g = sphere_metric_diag(theta)
    out = np.zeros(theta.shape)
    for k in range(m - 1):
        out[..., k] = (dim - 2 - k) / np.tan(theta[..., k]) / g[..., k]
    return out


@dataclass(frozen=True)
class CylPoint:
    """A point ``(s, θ)`` of ``R × S^{d-1}``."""

    s: float
    theta: tuple

    def as_array(self):
        return np.array((self.s,) + tuple(self.theta), dtype=float)

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(float(y[0]), tuple(float(t) for t in y[1:]))


def to_cylindrical(x):
    """Map Cartesian points to ``(s, θ)`` arrays with ``s = log |x|``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise OriginError("the origin has no cylindrical coordinates")
    s = np.log(r)
    theta = angles_from_sphere(x / r[..., None])
    return np.concatenate([s[..., None], theta], axis=-1)


def from_cylindrical(y):
    """Inverse of :func:`to_cylindrical`; accepts arrays or :class:`CylPoint`."""
    if isinstance(y, CylPoint):
        y = y.as_array()
    y = np.asarray(y, dtype=float)
    return np.exp(y[..., :1]) * sphere_from_angles(y[..., 1:])


# ---------------------------------------------------------------------------
# diffusions


class Diffusion:
    """Common interface: coefficients of ``L`` and the reference measure."""

    dim: int

    def contains(self, y):
        return np.ones(np.shape(y)[:-1], dtype=bool)

    def check(self, y):
        if not np.all(self.contains(y)):
            raise DomainError(f"point outside the domain of {type(self).__name__}")

    def inv_metric(self, y):
        raise NotImplementedError

    def metric_lower(self, y):
        return np.linalg.inv(self.inv_metric(y))

    def drift(self, y):
        raise NotImplementedError

    def log_density(self, y):
        raise NotImplementedError

    def density(self, y):
        return np.exp(self.log_density(y))

    def weight(self, y):
        raise NotImplementedError

    def volume_density(self, y):
        return np.sqrt(np.linalg.det(self.metric_lower(y)))


class ModelSpace(Diffusion):
    """Euclidean, spherical or hyperbolic CKN space on punctured ``R^d`` or the punctured ball.

    Upper metric ``F(x) δ`` with ``F = |x|^{2(1-α)} c(x)^2``, density
    ``|x|^{-bp} c(x)^{-n}`` and weight ``(n-d) log c - α(n-d) log |x|``,
    where ``c`` is ``1``, ``φ = (1+|x|^{2α})/2`` or ``ψ = (1-|x|^{2α})/2``.
    """

    def __init__(self, kind, params):
        self.kind = ModelKind.parse(kind)
        if not params.n_is_finite:
            raise DegenerateParams("model spaces need finite n")
        if self.kind is not ModelKind.EUCLIDEAN and params.alpha <= 0:
            raise DegenerateParams("spherical and hyperbolic spaces need alpha > 0")
        self.params = params
        self.dim = params.d

    def __repr__(self):
        p = self.params
        return f"ModelSpace({self.kind.value}, a={p.a}, b={p.b}, d={p.d})"

    def contains(self, x):
        r = np.linalg.norm(x, axis=-1)
        if self.kind is ModelKind.HYPERBOLIC:
            return (r > 0) & (r < 1)
        return r > 0

    def _r(self, x):
        x = np.asarray(x, dtype=float)
        self.check(x)
        return x, np.linalg.norm(x, axis=-1)

    def conformal_factor(self, x):
        x, r = self._r(x)
        r2a = r ** (2 * self.params.alpha)
        if self.kind is ModelKind.SPHERICAL:
            return (1 + r2a) / 2
        if self.kind is ModelKind.HYPERBOLIC:
            return (1 - r2a) / 2
        return np.ones_like(r)

    def grad_log_conformal_factor(self, x):
        x, r = self._r(x)
        alpha = self.params.alpha
        if self.kind is ModelKind.EUCLIDEAN:
            return np.zeros_like(x)
        c = self.conformal_factor(x)
        sign = 1.0 if self.kind is ModelKind.SPHERICAL else -1.0
        return (sign * alpha * r ** (2 * alpha - 2) / c)[..., None] * x

    def metric_factor(self, x):
        """The scalar ``F`` with ``g^{ij} = F δ^{ij}``."""
        x, r = self._r(x)
        return r ** (2 * (1 - self.params.alpha)) * self.conformal_factor(x) ** 2

    def inv_metric(self, x):
        return self.metric_factor(x)[..., None, None] * np.eye(self.dim)

    def metric_lower(self, x):
        return (1 / self.metric_factor(x))[..., None, None] * np.eye(self.dim)

    def log_density(self, x):
        x, r = self._r(x)
        p = self.params
        return -p.b * p.p * np.log(r) - p.n * np.log(self.conformal_factor(x))

    def measure_density(self, x):
        return self.density(x)

    def weight(self, x):
        x, r = self._r(x)
        p = self.params
        return (p.n - p.d) * (np.log(self.conformal_factor(x)) - p.alpha * np.log(r))

    def drift(self, x):
        x, r = self._r(x)
        p = self.params
        inner = -2 * p.a * x / (r**2)[..., None] + (2 - p.n) * self.grad_log_conformal_factor(x)
        return self.metric_factor(x)[..., None] * inner

    def volume_density(self, x):
        return self.metric_factor(x) ** (-self.dim / 2)


def make_space(kind, params):
    return ModelSpace(kind, params)


class CylChart(Diffusion):
    """Spherical CKN space in the chart ``(s, θ)``, ``x = e^s ω(θ)``.

    ``alpha`` and ``n`` default to the values in ``params`` and may be
    arrays broadcasting against the batch axes of evaluation points, which
    lets one evaluate many parameter sets at once.
    """

    def __init__(self, params, alpha=None, n=None):
        self.params = params
        d = params.d
        self.d = d
        self.dim = d
        self.alpha = params.alpha if alpha is None else np.asarray(alpha, dtype=float)
        self.n = params.n if n is None else np.asarray(n, dtype=float)
        if np.any(np.asarray(self.alpha) <= 0) or not np.all(np.isfinite(self.n)):
            raise DegenerateParams("the cylindrical chart needs alpha > 0 and finite n")

    def contains(self, y):
        y = np.asarray(y)
        th = y[..., 1:-1]
        return np.all((th > 0) & (th < np.pi), axis=-1)

    def phi(self, s):
        return np.cosh(self.alpha * s)

    def dphi(self, s):
        return self.alpha * np.sinh(self.alpha * s)

    def log_phi(self, s):
        # overflow-safe log cosh
        t = np.abs(self.alpha * s)
        return t + np.log1p(np.exp(-2 * t)) - np.log(2.0)

    def phi_ratio(self, s):
        """``φ'/φ = α tanh(α s)``."""
        return self.alpha * np.tanh(self.alpha * s)

    def weight_cyl(self, s):
        return (self.n - self.d) * self.log_phi(s)

    def measure_density_cyl(self, s):
        return np.exp(-self.n * self.log_phi(s))

    def weight(self, y):
        return self.weight_cyl(np.asarray(y)[..., 0])

    def h_diag(self, y):
        y = np.asarray(y, dtype=float)
        return np.concatenate([np.ones(y.shape[:-1] + (1,)), sphere_metric_diag(y[..., 1:])], axis=-1)

    def metric_lower(self, y):
        y = np.asarray(y, dtype=float)
        diag = self.h_diag(y) / self.phi(y[..., 0])[..., None] ** 2
        return diag[..., :, None] * np.eye(self.dim)

    def inv_metric(self, y):
        y = np.asarray(y, dtype=float)
        diag = self.phi(y[..., 0])[..., None] ** 2 / self.h_diag(y)
        return diag[..., :, None] * np.eye(self.dim)

    def drift(self, y):
        y = np.asarray(y, dtype=float)
        s = y[..., 0]
        phi2 = self.phi(s) ** 2
        first = (2 - self.n) * self.phi_ratio(s)
        rest = sphere_drift(y[..., 1:])
        first, rest = np.broadcast_arrays(first[..., None], rest)
        return phi2[..., None] * np.concatenate([first[..., :1], rest], axis=-1)

    def log_density(self, y):
        y = np.asarray(y, dtype=float)
        g = sphere_metric_diag(y[..., 1:])
        return -self.n * self.log_phi(y[..., 0]) + 0.5 * np.sum(np.log(g), axis=-1)

    def volume_density(self, y):
        y = np.asarray(y, dtype=float)
        g = sphere_metric_diag(y[..., 1:])
        return self.phi(y[..., 0]) ** (-self.d) * np.sqrt(np.prod(g, axis=-1))

    def cartesian_density(self, s):
        """Spherical CKN density at ``r = e^s`` times the Jacobian ``r^d``."""
        p = self.params
        r = np.exp(s)
        return 2.0**p.n * r ** (p.d - p.b * p.p) * (1 + r ** (2 * p.alpha)) ** (-p.n)


class SphereChart(Diffusion):
    """Round ``S^{d-1}`` in iterated polar angles with ``L = Δ_θ``."""

    def __init__(self, d):
        self.d = d
        self.dim = d - 1

    def contains(self, y):
        th = np.asarray(y)[..., :-1]
        return np.all((th > 0) & (th < np.pi), axis=-1)

    def metric_lower(self, y):
        return sphere_metric_diag(y)[..., :, None] * np.eye(self.dim)

    def inv_metric(self, y):
        return (1 / sphere_metric_diag(y))[..., :, None] * np.eye(self.dim)

    def drift(self, y):
        return sphere_drift(y)

    def log_density(self, y):
        return 0.5 * np.sum(np.log(sphere_metric_diag(y)), axis=-1)

    def weight(self, y):
        return np.zeros(np.shape(y)[:-1])


def metric_lower(space, point):
    """Lower-index metric of a space or chart at ``point`` (domain checked)."""
    point = np.asarray(point, dtype=float)
    space.check(point)
    return space.metric_lower(point)


# ---------------------------------------------------------------------------
# seeded sample sets


def sample_angles(rng, shape, d, margin=POLE_MARGIN):
    """Angles uniformly spread away from the chart poles by ``margin``."""
    polar = rng.uniform(margin, np.pi - margin, size=tuple(shape) + (d - 2,))
    azim = rng.uniform(margin, 2 * np.pi - margin, size=tuple(shape) + (1,))
    return np.concatenate([polar, azim], axis=-1)


def sample_cylinder(d, count, seed=0, s_range=(-2.0, 2.0), margin=POLE_MARGIN):
    rng = np.random.default_rng(seed)
    s = rng.uniform(*s_range, size=(count, 1))
    return np.concatenate([s, sample_angles(rng, (count,), d, margin)], axis=-1)


def sample_cartesian(space, count, seed=0, r_range=None):
    """Points with radius in ``r_range`` and uniformly random direction."""
    rng = np.random.default_rng(seed)
    d = space.dim
    if r_range is None:
        hyper = getattr(space, "kind", None) is ModelKind.HYPERBOLIC
        r_range = (0.15, 0.85) if hyper else (0.2, 3.0)
    r = rng.uniform(*r_range, size=count)
    g = rng.standard_normal((count, d))
    return r[:, None] * g / np.linalg.norm(g, axis=-1, keepdims=True)
