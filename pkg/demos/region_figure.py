"""Draw the Felli-Schneider and DGZ curves for d = 4 and report where they sit.

Run:  python3 demos/region_figure.py [output.svg]
"""

import math
import sys

from cknlab import regions
from cknlab.params import critical_a

D = 4


def main(path="regions_d4.svg"):
    rows = regions.region_rows(D, -4.0, critical_a(D) - 0.01, 400)
    with open(path, "w") as fh:
        fh.write(regions.to_svg(rows, D))
    print(f"wrote {path} with {len(rows)} samples of each curve")

    # both curves meet at the origin; further left the DGZ curve stays above
    gaps = [r.b_dgz - r.b_fs for r in rows if r.b_dgz is not None]
    print(f"smallest gap b_dgz - b_fs: {min(gaps):.3e}")
    print(f"dominance violations: {len(regions.dominance_violations(rows))}")
    left = regions.region_rows(D, -2.0, -1.0, 2)[0]
    print(f"b_fs(-2) = {left.b_fs:.15f}   sqrt(3) - 3 = {math.sqrt(3) - 3:.15f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
