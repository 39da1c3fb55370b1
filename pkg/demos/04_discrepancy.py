"""Low-temperature gas and its discrepancy.

At inverse temperature beta = c log n the gas is almost crystalline, so the
number of points in a window deviates from its expectation by much less than
the perimeter-squared worst case.  This demo uses a small n so it finishes in
seconds; the acceptance suite runs the same sweep at n = 4096.

Run: python3 demos/04_discrepancy.py
"""

from coulomblab import discrepancy, gas
from coulomblab.geometry import Disk, Rect
from coulomblab.potential import GINIBRE

n = 512
cfg = gas.sample(n, GINIBRE, gas.SamplerConfig(c=2.0, sweeps=300, burn_in=150, seed=1))
print(f"gas n={n}: acceptance {cfg.meta.get('acceptance')}, min separation * sqrt(n) "
      f"{gas.min_separation(cfg) * n ** 0.5:.3f}")

rep = discrepancy.boundary_sweep(GINIBRE, 2.0, [n], [2, 4, 8], [1], sweeps=300, burn_in=150,
                                 configs={(n, 1): cfg})
fit = rep.fits["per_seed"][f"{n}/1"]
print("\nboundary windows Disk(L):")
for row in rep.rows:
    print(f"  L={row.scale:4.1f}  sup |count - expected| = {row.discrepancy:.2f}")
print(f"slope of log sup vs log L: {fit['slope']:.2f} (a perimeter law gives 1)")

windows = {"disk2": Disk(0j, 2.0), "square4": Rect(-2 - 2j, 4.0, 4.0)}
bulk = discrepancy.bulk_sweep(GINIBRE, 2.0, [n], windows, [1], configs={(n, 1): cfg})
print("\nbulk sup discrepancy / perimeter:",
      {k: round(v[0], 3) for k, v in bulk.fits["ratio_by_window"].items()})
