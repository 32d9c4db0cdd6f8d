"""Weyl sums over the root sequence and the star discrepancy as N grows."""

import math

from sectorroots.lattice import SectorWindow, sequence_Y
from sectorroots.weyl import discrepancy, discrepancy_trend, weyl_sums_profile

sector = SectorWindow(0.2, 1.1)

# %% normalized |sum e(h nu / n)| / count for small h
for row in weyl_sums_profile(20_000, 6, sector):
    if row.h:
        print(f"h={row.h}  |S_h|/count = {row.normalized_abs:.4f}")

# %% discrepancy shrinks as more moduli enter
for N, d in discrepancy_trend([10**2, 10**3, 10**4, 10**5], sector):
    print(f"N={N:>6}  D* = {d:.4f}  (sqrt(count) D* = {d * math.sqrt(len(sequence_Y(N, sector))):.3f})")

# %% the whole quarter-plane for comparison
print("full sector, N=10^5:", discrepancy([r.normalized for r in sequence_Y(10**5)]))
