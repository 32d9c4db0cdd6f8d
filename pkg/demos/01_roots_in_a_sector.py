"""Roots of X^2 + 1 mod n, read off from primitive lattice points.

Each primitive (a, b) with n = a^2 + b^2 gives the root nu = b / a mod n. Restricting the
angle of (a, b) picks out a subsequence; this script shows how its normalized roots spread.
"""

import math

import numpy as np

from sectorroots.lattice import SectorWindow, count_primes_1mod4, count_sector_primes, sequence_Y

# %% the first few roots, in order of modulus
for r in sequence_Y(30):
    print(f"n={r.n:3d}  nu={r.nu:3d}  nu/n={r.normalized:.4f}  angle={r.angle:.4f}")

# %% primes up to 10^4 and the ones whose lattice point lies in [0, pi/6]
sixth = SectorWindow(0.0, math.pi / 6)
print("primes 2 or 1 mod 4:", count_primes_1mod4(10_000))
print("of which in the sector:", count_sector_primes(10_000, sixth))

# %% where do the sector roots land in [0, 1)?
roots = np.array([r.normalized for r in sequence_Y(200_000, sixth)])
hist, edges = np.histogram(roots, bins=10, range=(0.0, 1.0))
for lo, count in zip(edges, hist):
    print(f"[{lo:.1f}, {lo + 0.1:.1f})  {'#' * (60 * count // hist.max())}")
print("fraction in [0, 0.75]:", np.mean(roots <= 0.75))
