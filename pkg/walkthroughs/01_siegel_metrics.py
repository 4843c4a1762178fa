"""Period lattices on the Siegel upper half space and the metric comparison.

Run: python3 walkthroughs/01_siegel_metrics.py
"""

from math import pi

import numpy as np

from ksverify import siegel as sg
from ksverify.zlattice import covolume

# The simplest point: Z = i on H_1.  The period lattice is Z i + Z, covolume 1.
z = sg.standard_point(1)
print("covolume at Z = i:", covolume(sg.period_lattice(z)))
print("Faltings norm^2  :", sg.faltings_norm_sq(z), "(1/pi =", 1 / pi, ")")
print("Petersson norm   :", sg.petersson_norm_siegel(z))

# The comparison holds at every point, not only at i.  Sample a few.
rng = np.random.default_rng(1)
for r, g in ((2, 1), (3, 1), (1, 2)):
    point = sg.random_siegel_point(rng, r, g)
    print(f"r={r} g={g}: residual {sg.verify_siegel_main(point):.2e}, "
          f"covolume gap {sg.covolume_crosscheck(point):.2e}")

# The integral form on Z^{2r} is alternating and unimodular.  Its real
# extension is compatible with i, and -E(ix, x) is positive.
print(sg.riemann_form_exact_checks(2))
ax = sg.riemann_axioms(sg.random_siegel_point(rng, 2), rng, 200)[0]
print("orientation", ax["orientation"], "compat", f"{ax['compat_defect']:.1e}", "margin", f"{ax['min_margin']:.3f}")
