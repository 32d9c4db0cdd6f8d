"""A smooth lattice sum computed twice: directly over lattice points, and as a
finite sum of a truncated Poincare series over cosets of Gamma_0(q) in SL2(Z)."""

import math

import numpy as np

from sectorroots.bump import build_F, build_G
from sectorroots.lattice import SectorWindow
from sectorroots.modular import IwasawaCoords, from_iwasawa, random_sl2z
from sectorroots.poincare import bound_report, eval_P, smooth_linear_form
from sectorroots.weyl import smooth_linear_sum

G = build_G(SectorWindow(0.0, math.pi / 6, 0.05))

# %% the two evaluations agree to rounding
for q in (1, 5, 13):
    for h in (1, 2):
        F = build_F(h, 500)
        a, b = smooth_linear_form(q, h, 500, F, G), smooth_linear_sum(q, h, 500, F, G)
        print(f"q={q} h={h}  cosets: {a:.10f}   lattice: {b:.10f}")

# %% P is left-invariant under Gamma_0(q)
F = build_F(1, 500)
g = from_iwasawa(IwasawaCoords(0.3, 0.8, 1.0))
rng = np.random.default_rng(1)
print("P(g)        =", eval_P(g, 5, 1, F, G).value)
print("P(gamma g)  =", eval_P(random_sl2z(rng, q=5) @ g, 5, 1, F, G).value)

# %% |P(tau)| against the shape of the bound (no implicit constant)
rows = bound_report([from_iwasawa(IwasawaCoords(x, 1.0, 0.0)) for x in (0.0, 0.25, 0.5)],
                    q=1, h=2, N=10_000, Z=0.3, delta=0.1)
for r in rows:
    print(f"tau {r.tau_id}: |P| = {r.absP:.4e}  ratio to bound shape = {r.ratio:.3e}")
