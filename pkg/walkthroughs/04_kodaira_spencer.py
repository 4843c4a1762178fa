"""Exact Kodaira-Spencer pairing, the antilinear model and a toy Cech cover.

Run: python3 walkthroughs/04_kodaira_spencer.py
"""

from fractions import Fraction

import numpy as np

from ksverify import ks_hodge as ks

# Pairing derivatives of period vectors with period vectors gives -dZ exactly.
point = ks.random_rational_point(np.random.default_rng(2), 3)
for i, k in ((0, 0), (0, 2), (1, 2)):
    b = ks.ks_pairing_matrix(point, i, k)
    real = [[str(entry[0]) for entry in row] for row in b]
    print(f"direction ({i + 1},{k + 1}):", real, "offending:", ks.verify_ks_pairing(point, i, k))

# For E = Im H, the antilinear part of E(z, .) is -(i/2) H(z, .).
res = ks.verify_lemma_app(ks.standard_lemma_form(), np.random.default_rng(0), 50)
print("antilinear defect on Z + iZ:", f"{res['defect']:.1e}")

# On a 3x3 cover of C/(Z + iZ) the transition constants form a cocycle.
cover = ks.CechCoverToy(3)
alpha = ks.riemann_functional((Fraction(1, 3), Fraction(1, 5)))
print("cech:", ks.cech_cocycle_check(cover, alpha, (1, 0)))
