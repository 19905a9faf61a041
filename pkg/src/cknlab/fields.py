"""Seeded smooth test fields.

Two families are used throughout the checks:

* :class:`TrigPoly` on ``R^D`` with exact gradient and Hessian, the
  oracle for finite-difference tests.
* :class:`CylField`, ``v = exp(q(s, ω)) sech(β s)^κ`` on ``R × S^{d-1}``,
  positive and smooth on the sphere, with exact ``∂_s v`` and round
  carré du champ ``Γ^θ(v)``.  ``q`` is a low-order trigonometric
  polynomial in ``s`` with coefficients linear and quadratic in ``ω``.

Every sample is drawn from ``numpy.random.default_rng([seed, index])`` so a
given ``(seed, index)`` always yields the same field.
"""

from dataclasses import dataclass

import numpy as np

from .chart import sphere_from_angles


def _rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


@dataclass(frozen=True)
class TrigPoly:
    """``f(x) = Σ_k c_k sin(κ_k · x + φ_k)``."""

    coeffs: np.ndarray
    freqs: np.ndarray
    phases: np.ndarray

    def _arg(self, x):
        return np.einsum("...i,ki->...k", np.asarray(x, dtype=float), self.freqs) + self.phases

    def __call__(self, x):
        return np.sin(self._arg(x)) @ self.coeffs

    def grad(self, x):
        return (np.cos(self._arg(x)) * self.coeffs) @ self.freqs

    def hess(self, x):
        w = -np.sin(self._arg(x)) * self.coeffs
        return np.einsum("...k,ki,kj->...ij", w, self.freqs, self.freqs)


def trig_poly(dim, index=0, seed=0, terms=4, max_freq=1.5, amplitude=0.5):
    rng = _rng(seed, index)
    return TrigPoly(coeffs=rng.uniform(-amplitude, amplitude, terms),
                    freqs=rng.uniform(-max_freq, max_freq, (terms, dim)),
                    phases=rng.uniform(0, 2 * np.pi, terms))


@dataclass(frozen=True)
class CylField:
    """``v(s, θ) = exp(q(s, ω)) sech(β s)^κ`` with ``ω = ω(θ)``.

    ``q = (u·ω) cos s + (w·ω) sin s + c sin s + ωᵀQω cos(s/2)``.
    """

    u: np.ndarray
    w: np.ndarray
    c: float
    Q: np.ndarray
    beta: float
    kappa: float

    def _parts(self, y):
        y = np.asarray(y, dtype=float)
        s = y[..., 0]
        om = sphere_from_angles(y[..., 1:])
        cs, sn = np.cos(s), np.sin(s)
        ch, sh = np.cos(s / 2), np.sin(s / 2)
        uo = om @ self.u
        wo = om @ self.w
        qo = np.einsum("...i,ij,...j->...", om, self.Q, om)
        q = uo * cs + wo * sn + self.c * sn + qo * ch
        q_s = -uo * sn + wo * cs + self.c * cs - 0.5 * qo * sh
        amb = (cs[..., None] * self.u + sn[..., None] * self.w
               + 2 * ch[..., None] * (om @ self.Q))
        tang = amb - np.sum(amb * om, axis=-1, keepdims=True) * om
        return s, q, q_s, np.sum(tang**2, axis=-1)

    def __call__(self, y):
        s, q, _, _ = self._parts(y)
        return np.exp(q - self.kappa * _log_cosh(self.beta * s))

    def cyl_derivs(self, y):
        """``(∂_s v, Γ^θ(v))`` at ``y``."""
        s, q, q_s, tang2 = self._parts(y)
        v = np.exp(q - self.kappa * _log_cosh(self.beta * s))
        v_s = v * (q_s - self.kappa * self.beta * np.tanh(self.beta * s))
        return v_s, v**2 * tang2


def _log_cosh(x):
    t = np.abs(x)
    return t + np.log1p(np.exp(-2 * t)) - np.log(2.0)


def cyl_field(d, index=0, seed=0, amplitude=0.3, radial=False):
    """Member ``index`` of the seeded cylinder family."""
    rng = _rng(seed, index)
    u = rng.uniform(-amplitude, amplitude, d)
    w = rng.uniform(-amplitude, amplitude, d)
    c = float(rng.uniform(-amplitude, amplitude))
    Q = rng.uniform(-amplitude, amplitude, (d, d)) / 2
    Q = (Q + Q.T) / 2
    if radial:
        u, w, Q = np.zeros(d), np.zeros(d), np.zeros((d, d))
    return CylField(u=u, w=w, c=c, Q=Q, beta=float(rng.uniform(0.3, 1.0)),
                    kappa=float(rng.uniform(0.0, 1.0)))


@dataclass(frozen=True)
class SphereField:
    """``exp(a·ω + ωᵀBω)`` on ``S^{d-1}`` as a function of iterated polar angles."""

    a: np.ndarray
    B: np.ndarray

    def __call__(self, theta):
        om = sphere_from_angles(theta)
        return np.exp(om @ self.a + np.einsum("...i,ij,...j->...", om, self.B, om))


def sphere_field(d, index=0, seed=0, amplitude=0.5):
    rng = _rng(seed, index)
    B = rng.uniform(-amplitude, amplitude, (d, d)) / 2
    return SphereField(a=rng.uniform(-amplitude, amplitude, d), B=(B + B.T) / 2)


def first_harmonic(y):
    """``ω_1 = cos θ_1``, a first spherical harmonic on ``S^{d-1}``."""
    return np.cos(np.asarray(y)[..., 0])


@dataclass(frozen=True)
class RandomMetric:
    """Lower-index metric ``I + B(x) B(x)ᵀ`` with trigonometric entries in ``B``."""

    entries: tuple
    dim: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        b = np.stack([e(x) for e in self.entries], axis=-1).reshape(x.shape[:-1] + (self.dim, self.dim))
        return np.eye(self.dim) + np.einsum("...ik,...jk->...ij", b, b)


def random_metric(dim, index=0, seed=0, amplitude=0.3):
    entries = tuple(trig_poly(dim, index * dim * dim + k, seed=seed + 1000, terms=3,
                              max_freq=1.0, amplitude=amplitude)
                    for k in range(dim * dim))
    return RandomMetric(entries=entries, dim=dim)
