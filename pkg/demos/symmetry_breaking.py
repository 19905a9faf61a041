"""Follow the angular witness across the Felli-Schneider curve.

For fixed a the Poincare deficit of ``ω_1 / cosh(α s)`` is computed on
the spherical model while b moves from inside the region to outside.  It
changes sign exactly where ``α²(n-1) = d-1``.

Run:  python3 demos/symmetry_breaking.py
"""

import warnings

import numpy as np

from cknlab import quadrature as quad
from cknlab.errors import OutsideFSWarning
from cknlab.inequalities import symmetry_breaking_witness, witness_deficit_exact
from cknlab.params import derive, fs_curve

D, A = 3, -1.5

warnings.simplefilter("ignore", OutsideFSWarning)
b_star = fs_curve(A, D)
print(f"d = {D}, a = {A}: Felli-Schneider curve at b = {b_star:.6f}\n")
print(f"{'b':>9} {'alpha':>8} {'rho-(d-1)':>11} {'deficit':>12} {'closed form':>12}")
for b in np.linspace(A + 0.02, A + 0.98, 9).tolist() + [b_star]:
    p = quad.attach_z(derive(A, b, D))
    rep = symmetry_breaking_witness(p, quad.build_grid(D, p, m=8))
    print(f"{b:9.4f} {p.alpha:8.4f} {p.rho - (D - 1):11.4f} {rep.deficit:12.4e} "
          f"{witness_deficit_exact(p):12.4e}")
