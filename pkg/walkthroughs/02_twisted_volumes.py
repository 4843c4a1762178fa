"""Quaternionic lattices O_B (tau, 1)^t and their covolumes.

Run: python3 walkthroughs/02_twisted_volumes.py
"""

import numpy as np

from ksverify import twisted as tw
from ksverify.fixtures import BUILTIN, load_fixture
from ksverify.quatalg import rational_discriminant, reduced_discriminant

for name in BUILTIN:
    fx = load_fixture(name)
    print(f"\n{name}: {fx.source}")
    print("  reduced discriminant of the order:", reduced_discriminant(fx.order))
    if fx.g == 1:
        a, b = fx.algebra.a.coords[0], fx.algebra.b.coords[0]
        print("  ramified primes give d_B =", rational_discriminant(a, b))
    point = tw.TwistedPoint((1j,) * fx.g)
    lat = tw.build_twisted_lattice(fx.order, fx.mu, point, multiplier=fx.lattice_multiplier)
    print("  covolume at tau = i:", tw.mpmath.nstr(lat.covolume(), 20))
    rng = np.random.default_rng(0)
    worst = max(
        tw.verify_twisted_main(
            tw.build_twisted_lattice(fx.order, fx.mu, tw.random_twisted_point(rng, fx.g),
                                     multiplier=fx.lattice_multiplier),
            fx.d_B,
        )
        for _ in range(20)
    )
    print(f"  worst metric residual over 20 points: {worst:.1e}")

# The dual of the division order under Tr trd(x y*) contains it with index d_B^2.
print("\n[O^# : O] for division_q6:", tw.dual_index(load_fixture("division_q6").order))
