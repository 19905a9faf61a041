"""Parameter algebra of the Caffarelli-Kohn-Nirenberg family.

Every quantity is a closed-form function of ``(a, b, d)``.  The admissible
set is ``a <= b <= a + 1`` with ``a < a_c = (d - 2) / 2`` and ``d >= 3``.
"""

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateParams, HardyOverflowWarning, MissingZ, OutsideFSWarning

# slack used for boundary flags such as b == a + 1
_FLAG_TOL = 1e-14
# slack used for region membership tests
_REGION_TOL = 1e-12
HARDY_DIVERGENCE_TOL = 1e-8


def critical_a(d):
    return (d - 2) / 2


@dataclass(frozen=True)
class CknParams:
    """Derived parameters of one CKN inequality.

    ``n`` is ``math.inf`` on the Hardy boundary ``b = a + 1``; ``alpha`` is
    then exactly zero.  ``gamma0`` is ``None`` unless ``n`` is finite,
    ``n > d`` and ``alpha > 0``.  ``z`` is filled in by
    :func:`cknlab.quadrature.normalization_Z`.
    """

    a: float
    b: float
    d: int
    a_c: float
    p: float
    n: float
    alpha: float
    b_dgz: float
    rho: float
    gamma0: Optional[float] = None
    z: Optional[float] = None

    @property
    def n_alpha(self):
        """The product n * alpha, finite even on the Hardy boundary."""
        return self.d * (self.a_c - self.a) / (self.a_c - self.a + self.b)

    @property
    def alpha_from_exponent(self):
        """alpha computed as 1 + a - p b / 2 instead of the factored form."""
        return 1 + self.a - self.p * self.b / 2

    @property
    def n_is_finite(self):
        return math.isfinite(self.n)

    @property
    def scaling_residual(self):
        """d - n alpha - p b, zero for admissible parameters."""
        return self.d - self.n_alpha - self.p * self.b

    def with_z(self, z):
        return replace(self, z=float(z))


def dgz_value(a, b, d):
    """The constant (d-2) - (n-2) alpha^2 written directly in terms of (a, b)."""
    a_c = critical_a(d)
    return 2 * a_c - 2 * (a_c - a) ** 2 * (1 + a - b) / (a_c + b - a)


def derive(a, b, d):
    """Compute every derived parameter for ``(a, b, d)``.

    Raises
    ------
    DegenerateParams
        If ``d < 3``, ``a >= a_c`` or ``a_c - a + b <= 0``.
    """
    if int(d) != d or d < 3:
        raise DegenerateParams(f"dimension must be an integer >= 3, got {d!r}")
    d = int(d)
    a = float(a)
    b = float(b)
    a_c = critical_a(d)
    if a >= a_c:
        raise DegenerateParams(f"a={a} must be below a_c={a_c}")
    denom = a_c - a + b
    if denom <= 0:
        raise DegenerateParams(f"a_c - a + b = {denom} must be positive")

    p = d / denom
    gap = 1 + a - b
    if abs(gap) <= _FLAG_TOL * max(1.0, abs(a), abs(b)):
        n = math.inf
        alpha = 0.0
    else:
        n = d / gap
        alpha = (a_c - a) * gap / denom
    n_alpha = d * (a_c - a) / denom
    # (n - 2) alpha^2 = n alpha * alpha - 2 alpha^2 stays finite when n is infinite
    b_dgz = (d - 2) - (n_alpha * alpha - 2 * alpha**2)
    rho = n_alpha * alpha - alpha**2

    gamma0 = None
    if math.isfinite(n) and n > d and alpha > 0:
        gamma0 = -2 * (d - 1) * b_dgz / (alpha**2 * (n - d) * (n - 2))
    return CknParams(a=a, b=b, d=d, a_c=a_c, p=p, n=n, alpha=alpha,
                     b_dgz=b_dgz, rho=rho, gamma0=gamma0)


@dataclass(frozen=True)
class RegionReport:
    in_theta: bool
    on_hardy_boundary: bool
    on_sobolev_line: bool
    in_fs_by_alpha: bool
    in_fs_by_curve: bool
    in_fs_by_curve_alt_gate: bool
    alpha_le_one: bool
    in_dgz: bool
    characterizations_agree: bool

    @property
    def in_fs(self):
        """Canonical Felli-Schneider verdict: alpha^2 (n - 1) <= d - 1."""
        return self.in_fs_by_alpha

    def disagreements(self):
        """Names of the Felli-Schneider tests that differ from the canonical one."""
        out = []
        if self.in_fs_by_curve != self.in_fs_by_alpha:
            out.append("in_fs_by_curve")
        if self.alpha_le_one != self.in_fs_by_alpha:
            out.append("alpha_le_one")
        return out


def fs_curve(a, d):
    """Felli-Schneider curve b_FS(a)."""
    a_c = critical_a(d)
    if a >= a_c:
        raise DegenerateParams(f"a={a} must be below a_c={a_c}")
    t = a_c - a
    return d * t / (2 * math.sqrt(t * t + d - 1)) - t


def _fs_by_curve(a, b, d, gate_on_b):
    gated = (b <= 0) if gate_on_b else (a <= 0)
    if not gated:
        return True
    return b >= fs_curve(a, d) - _REGION_TOL


def classify(params):
    """Evaluate region membership flags; boundary cases are flags, not errors."""
    a, b, d = params.a, params.b, params.d
    slack = _FLAG_TOL * max(1.0, abs(a), abs(b))
    in_theta = (a - slack <= b <= a + 1 + slack) and a < params.a_c
    # alpha^2 (n - 1) is rho; stays finite on the Hardy boundary
    by_alpha = params.rho <= (d - 1) + _REGION_TOL
    by_curve = _fs_by_curve(a, b, d, gate_on_b=True)
    by_curve_alt = _fs_by_curve(a, b, d, gate_on_b=False)
    le_one = -_REGION_TOL <= params.alpha <= 1 + _REGION_TOL
    return RegionReport(
        in_theta=in_theta,
        on_hardy_boundary=not params.n_is_finite,
        on_sobolev_line=abs(b - a) <= slack,
        in_fs_by_alpha=by_alpha,
        in_fs_by_curve=by_curve,
        in_fs_by_curve_alt_gate=by_curve_alt,
        alpha_le_one=le_one,
        in_dgz=params.b_dgz >= -_REGION_TOL,
        characterizations_agree=(by_alpha == by_curve == le_one),
    )


def dgz_curve(a, d, tol=1e-12):
    """Root b* in [a, a+1] of b -> B_DGZ(a, b), or None without a sign change.

    B_DGZ is increasing in b on this bracket, so the root is unique when it
    exists.
    """
    a_c = critical_a(d)
    if a >= a_c:
        raise DegenerateParams(f"a={a} must be below a_c={a_c}")
    lo, hi = a, a + 1.0
    f_lo, f_hi = dgz_value(a, lo, d), dgz_value(a, hi, d)
    if abs(f_lo) < tol:
        return lo
    if abs(f_hi) < tol:
        return hi
    if f_lo * f_hi > 0:
        return None
    root = brentq(lambda b: dgz_value(a, b, d), lo, hi, xtol=1e-15, rtol=1e-15, maxiter=400)
    return root


def hardy_constant(a, d):
    """Optimal Hardy constant (2 / (d - 2 - 2a))^2.

    As ``a`` approaches ``a_c`` the denominator loses its significant
    digits; below ``HARDY_DIVERGENCE_TOL`` (relative) a
    :class:`HardyOverflowWarning` is issued, and ``inf`` is returned if
    the value overflows.
    """
    a_c = critical_a(d)
    if a >= a_c:
        raise DegenerateParams(f"a={a} must be below a_c={a_c}")
    denom = d - 2 - 2 * a
    if denom <= HARDY_DIVERGENCE_TOL * max(1.0, abs(a), float(d)):
        warnings.warn(f"Hardy constant diverges at a={a!r}", HardyOverflowWarning, stacklevel=2)
    try:
        value = (2.0 / denom) ** 2
    except OverflowError:
        value = math.inf
    return value if math.isfinite(value) else math.inf


def sobolev_constant(params):
    """Optimal constant 4 / (n (n-2) alpha^2 Z^(2/n)) of the spherical form.

    The value is returned even outside the Felli-Schneider region, with an
    :class:`OutsideFSWarning`, because optimality is only known inside it.
    """
    if params.z is None:
        raise MissingZ("attach Z with quadrature.normalization_Z first")
    if not params.n_is_finite or params.alpha <= 0:
        raise DegenerateParams("the Sobolev constant needs alpha > 0 and finite n")
    n, alpha = params.n, params.alpha
    if params.rho > params.d - 1 + _REGION_TOL or alpha > 1 + _REGION_TOL:
        warnings.warn(
            f"(a, b, d) = ({params.a}, {params.b}, {params.d}) is outside the "
            "Felli-Schneider region; the constant is not known to be optimal",
            OutsideFSWarning, stacklevel=2)
    # n (n-2) alpha^2 written as (n alpha)^2 - 2 alpha (n alpha) for large n
    na = params.n_alpha
    return 4.0 / ((na * na - 2 * alpha * na) * params.z ** (2.0 / n))


def sample_theta(d, count, seed=0, a_span=6.0):
    """Seeded ``(a, b)`` pairs with ``a_c - a_span < a < a_c`` and ``a <= b < a + 1``."""
    rng = np.random.default_rng([int(seed), int(d)])
    a_c = critical_a(d)
    a = a_c - a_span * (1 - rng.random(count))
    b = a + rng.random(count)
    return a, b
