"""Fekete points and the spectral sandwich.

Fekete configurations minimise the weighted energy and behave like the gas at
zero temperature.  Near the edge, the number of points in a microscopic disk
is trapped between counts of two concentration operators with slightly
different densities.

Run: python3 demos/03_fekete_and_sandwich.py
"""

from coulomblab import discrepancy, gas
from coulomblab.geometry import Disk
from coulomblab.potential import GINIBRE

for n in (2, 16, 64):
    cfg = gas.fekete(n, GINIBRE)
    print(f"Fekete n={n:3d}: H = {cfg.meta['H']:.6f}, min separation * sqrt(n) = "
          f"{gas.min_separation(cfg) * n ** 0.5:.3f}")

cfg = gas.fekete(64, GINIBRE)
W = Disk(0j, 3.0)
rep = discrepancy.landau_sandwich(cfg, GINIBRE, 1 + 0j, W, 64, gamma=0.3, C_fit=10.0)
print(f"\nwindow 1 + Disk(0, 3)/sqrt(64): N = {rep.N}, eroded N- = {rep.N_minus}, dilated N+ = {rep.N_plus}")
print(f"spectral counts: upper {rep.upper_count} (threshold {rep.upper_threshold:.3f}), "
      f"lower {rep.lower_count} (threshold {rep.lower_threshold:.3f})")
print(f"sandwich holds: {rep.holds}")

print("\nfinite operator count vs limiting erfc operator count at alpha = 1/2")
for n in (32, 64, 128, 256):
    f = discrepancy.finite_count(GINIBRE, 1 + 0j, W, n, 1.0, rep.M, rep.s, 0.5)
    g = discrepancy.limit_count(GINIBRE, 1 + 0j, W, n, 1.0, rep.M, rep.s, 0.5)
    print(f"  n={n:4d}: {f} vs {g}")
