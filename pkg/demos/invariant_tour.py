"""The n-conformal invariant on the three CKN model spaces.

Prints the finite-difference value of ``S_γ0`` at a few points of each
space next to its constant value, then applies a random conformal change
and checks the transformation law.
"""

import numpy as np

from cknlab import invariant as inv
from cknlab.chart import ModelKind, ModelSpace, sample_cartesian
from cknlab.fields import trig_poly
from cknlab.params import derive

p = derive(0.0, 0.5, 4)
print(f"(a, b, d) = (0, 0.5, 4): n = {p.n:g}, alpha = {p.alpha:.6f}, gamma0 = {p.gamma0:.6f}")

for kind in ModelKind:
    sp = ModelSpace(kind, p)
    x = sample_cartesian(sp, 5, seed=1)
    vals = inv.s_gamma(sp, p.gamma0, x)
    print(f"{kind.value:>14}: expected {inv.expected_s_gamma0(kind, p):+.6f}, "
          f"computed {np.array2string(vals, precision=6)}")

tau = trig_poly(4, 0, seed=2, amplitude=0.3)
sp = ModelSpace(ModelKind.SPHERICAL, p)
x = sample_cartesian(sp, 10, seed=3)
for gamma in (p.gamma0, 1.0):
    res = inv.transformation_law_residual(sp, gamma, tau, x)
    print(f"transformation law, gamma = {gamma:+.3f}: max residual {res.max():.2e}")
