"""Independent quadrature helpers shared by several test modules."""

import numpy as np

from cknlab.quadrature import panel_rule, sphere_rule


def bump(r, center, width):
    """Smooth bump ``exp(-1/(1-t²))`` in ``t = (r - center)/width``, zero for ``|t| >= 1``."""
    t = (np.asarray(r) - center) / width
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1 / (1 - t[inside] ** 2))
    return out


def annulus_nodes(d, r_lo, r_hi, panels=8, m=10):
    """Points and weights of a polar product rule for ``dx`` on an annulus in ``R^d``."""
    r, wr = panel_rule(r_lo, r_hi, panels)
    ang, wa = sphere_rule(d, m)
    from cknlab.chart import sphere_from_angles
    om = sphere_from_angles(ang)
    x = r[:, None, None] * om[None, :, :]
    w = (wr * r ** (d - 1))[:, None] * wa[None, :]
    return x, w
