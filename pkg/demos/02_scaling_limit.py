"""Zooming into the edge of the Ginibre droplet.

The finite-n kernel, rescaled at a point p_n = 1 - l/sqrt(n) near the unit
circle, converges in modulus to the erfc kernel F_l.  Deep inside the droplet
the same rescaling gives the Ginibre kernel instead.

Run: python3 demos/02_scaling_limit.py
"""

import math

import numpy as np

from coulomblab import kernel
from coulomblab.kernel import Erfc, FiniteN, Ginibre
from coulomblab.potential import GINIBRE

t = np.linspace(-2, 2, 21)
z = (t[:, None] + 1j * t[None, :]).ravel()
z = z[np.abs(z) <= 2]

print("boundary regime: sup |rescaled K_n| - |F_l| over |z|, |w| <= 2")
for n in (256, 1024, 4096):
    K = FiniteN(n, GINIBRE)
    row = []
    for l in (-1.0, 0.0, 2.0):
        got = kernel.rescaled_modulus(GINIBRE, 1 - l / math.sqrt(n), n, 1.0, z, z, kernel=K, outer=True)
        row.append(np.max(np.abs(got - np.abs(Erfc(l).matrix(z)))))
    print(f"  n={n:5d}  " + "  ".join(f"l={l:+.0f}: {e:.4f}" for l, e in zip((-1, 0, 2), row)))

bulk = kernel.rescaled_modulus(GINIBRE, 0.2 + 0.1j, 1024, 1.0, z, z, outer=True)
print(f"bulk regime at n=1024: {np.max(np.abs(bulk - np.abs(Ginibre().matrix(z)))):.2e}")

# The one-point density matches n dQ to machine precision well inside.
r = np.linspace(0, 1.3, 14)
d = FiniteN(1024).diagonal(r.astype(complex)) / 1024
print("\n|z|    K_n(z,z)/n")
for ri, di in zip(r, d):
    print(f"{ri:4.1f}   {di:.6f}")
