"""
The nonmonotone friction law and its smoothing
==============================================

The superpotential is ``j(x) = min(gamma1 / (2 delta) x^2, gamma2 x)``.  Its
derivative rises linearly up to the slip ``x* = 2 delta gamma2 / gamma1``
and then drops to the constant ``gamma2``: a sawtooth, not a monotone
graph.  The solver uses a C^1 smoothing ``S(x, eps)`` of ``-j`` that stays
within ``eps / 8`` of it.
"""

import numpy as np

from hvicontact.friction import FrictionLaw, smooth_S, smooth_S_prime, subdifferential, superpotential

law = FrictionLaw(delta=9e-6, gamma1=1e3, gamma2=5e2)
print("kink at x* =", law.crossing)

# At the kink the Clarke subdifferential is the whole interval between
# the two one-sided slopes.
print("dj(x*) =", subdifferential(law.crossing, law))
print("dj(0)  =", subdifferential(0.0, law))

xs = np.linspace(-2e-5, 4e-5, 7)
print("\n       x        j(x)     -S(x)     -S'(x)")
for eps in (0.1, 1e-3):
    print(f"eps = {eps}")
    for x in xs:
        print(f"{x: .2e} {superpotential(x, law): .3e} {-smooth_S(x, eps, law): .3e} {-smooth_S_prime(x, eps, law): .3e}")

# The gap to the max of the two branches peaks at the crossings.
grid = np.linspace(-1e-4, 1e-4, 20001)
for eps in (0.1, 0.01, 0.001):
    gap = smooth_S(grid, eps, law) + superpotential(grid, law)
    print(f"eps={eps:g}: max gap {gap.max():.3e}  (eps/8 = {eps / 8:.3e})")
