"""Concentration operators on disks.

On a centred disk the Ginibre concentration operator is diagonal in the
monomials, so its eigenvalues are regularised incomplete gamma values.  We
compare them with the Nystrom discretisation, then watch what happens when
the Ginibre kernel is replaced by the erfc kernel of a straight boundary.

Run: python3 demos/01_disk_spectrum.py
"""

import numpy as np

from coulomblab import operators
from coulomblab.geometry import Cut, Disk
from coulomblab.kernel import Erfc, Ginibre

R = 3.0
W = Disk(0j, R)

spec = operators.spectrum(operators.build(Ginibre(), W, h=0.1))
exact = operators.disk_eigenvalues(R)[: len(spec.eigenvalues)]
print(f"Ginibre on Disk(0, {R}): {len(spec.eigenvalues)} eigenvalues kept")
print(" k   nystrom    P(k+1, R^2)")
for k in range(0, 16, 2):
    print(f"{k:2d}   {spec.eigenvalues[k]:.5f}    {exact[k]:.5f}")

# Roughly |W|/pi eigenvalues sit near 1; the rest plunge within O(R) indices.
print(f"\ntrace = {spec.trace:.3f}, area/pi = {W.area() / np.pi:.3f}")
print(f"#(lambda > 1/2) = {operators.counting(spec, 0.5)}")
print(f"#(0.01 < lambda < 0.99) = {operators.plunge_count(spec, 0.01)} (the plunge region)")

# The erfc kernel only sees the half plane left of its cut line, so its
# eigenvalues sit below the Ginibre ones on the same window.
for l in (-1.0, 0.0, 2.0):
    e = operators.spectrum(operators.build(Erfc(l), W, h=0.1))
    print(f"erfc(l={l:+.0f}): trace {e.trace:.3f}, #(lambda > 1/2) = {operators.counting(e, 0.5)}")

# Counting bounds with a fixed constant on a cut window.
C = 0.462
half = Cut(W, 0.0, 0.0)
rs = operators.refined_spectrum(Erfc(0.0), half, h=0.1)
params = operators.bound_params(half, C)
a = operators.window_reach(Erfc(0.0), half)
print(f"\nhalf disk with erfc(0): refinement shift {rs.max_shift:.4f}")
for alpha in operators.ALPHAS:
    up = operators.pfad_rhs(half, alpha, a, params, "upper")
    lo = operators.pfad_rhs(half, alpha, a, params, "lower")
    print(f"alpha={alpha:<5} {lo:7.2f} <= #(>1-alpha)={operators.counting(rs.fine, 1 - alpha):3d}, "
          f"#(>alpha)={operators.counting(rs.fine, alpha):3d} <= {up:6.2f}")
