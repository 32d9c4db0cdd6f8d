"""Truncated evaluation of the Poincare series

    P(g) = sum over sigma in Gamma_inf \\ Gamma_0(q) of e(h x(sigma g)) F(4 pi h y(sigma g)) G(theta(sigma g)),

its coset aggregate over Gamma_0(q) \\ SL2(Z), and a report against the shape of
the spectral bound for |P(tau)|.

Gamma_inf is generated by the translation T alone, so sigma and -sigma are distinct
cosets; a coset is labelled by its bottom row (c, d), q | c, gcd(c, d) = 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from ._numtheory import divisor_count, modinv_array
from .bump import AngularCutoff, RadialCutoff, build_F, build_G
from .errors import HypothesisViolatedError
from .lattice import SectorWindow
from .modular import THETA_SIGN, Mat2, gamma0_coset_reps, iwasawa, random_sl2z
from .weyl import complex_fsum

BOUND_SCHEMA = "# schema: sectorroots.poincare_bound/1"
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PoincareEval:
    value: complex
    contributing_cosets: int
    q: int
    h: int
    N: float


def _integral_entries(g: Mat2) -> tuple[int, int, int, int] | None:
    if not g.is_integral():
        return None
    a, b, c, d = (int(round(float(v))) for v in (g.a, g.b, g.c, g.d))
    return (a, b, c, d) if a * d - b * c == 1 else None


def _rows(q: int, z0: complex, s_max: float):
    """Bottom rows (c, d), q | c, gcd(c, d) = 1, with |c z0 + d|^2 <= s_max."""
    x0, y0 = z0.real, z0.imag
    c_max = math.floor(math.sqrt(s_max) / y0)
    col = np.arange(-(c_max // q) * q, c_max + 1, q, dtype=np.int64)
    r = np.sqrt(np.maximum(s_max - (col * y0) ** 2, 0.0))
    d_lo = np.ceil(-col * x0 - r).astype(np.int64)
    d_hi = np.floor(-col * x0 + r).astype(np.int64)
    counts = np.maximum(d_hi - d_lo + 1, 0)
    c = np.repeat(col, counts)
    starts = np.repeat(d_lo, counts)
    offsets = np.arange(c.size, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    d = starts + offsets
    keep = np.gcd(c, d) == 1
    return c[keep], d[keep]


def _coset_coordinates(g: Mat2, q: int, s_max: float):
    """(x mod 1 as exact fraction or float, y, theta) of sigma g for all candidate rows."""
    z0 = iwasawa(g).z
    c, d = _rows(q, z0, s_max)
    ints = _integral_entries(g)
    if ints is not None:
        ga, gb, gc, gd = ints
        C = c * ga + d * gc
        D = c * gb + d * gd
        n = C * C + D * D
        # A D - B C = 1 and D^2 = -C^2 (mod n) give A C + B D = C D^{-1} (mod n)
        # modulus one means sigma g = +-T^m k, with integral x
        unit = n == 1
        safe_n = np.where(unit, 2, n)
        nu = np.where(unit, 0, np.mod(np.mod(C, safe_n) * modinv_array(np.mod(D, safe_n), safe_n), safe_n))
        y = 1.0 / n.astype(float)
        theta = np.mod(THETA_SIGN * np.arctan2(C.astype(float), D.astype(float)), TWO_PI)
        return ("exact", nu, n), y, theta
    x0, y0 = z0.real, z0.imag
    w = c * z0 + d
    y = y0 / np.abs(w) ** 2
    x = np.empty(c.size)
    zero = c == 0
    x[zero] = x0
    cz = c[~zero]
    a_frac = np.mod(modinv_array(np.mod(d[~zero], np.abs(cz)), np.abs(cz)) * np.sign(cz), np.abs(cz)) / np.abs(cz)
    x[~zero] = a_frac - (1.0 / (cz * w[~zero])).real
    C = c * float(g.a) + d * float(g.c)
    D = c * float(g.b) + d * float(g.d)
    theta = np.mod(THETA_SIGN * np.arctan2(C, D), TWO_PI)
    return ("float", x), y, theta


def eval_P(g: Mat2, q: int, h: int, F: RadialCutoff, G: AngularCutoff) -> PoincareEval:
    """Finite sum over the cosets whose 4 pi |h| y lands in supp F.

    The phase uses h and the radial weight |h|, so P for -h is the conjugate.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if h == 0:
        raise ValueError("h must be nonzero")
    lo, hi = F.support
    if lo <= 0:
        raise ValueError("F must be supported in (0, inf)")
    hh = abs(h)
    y0 = iwasawa(g).y
    # 4 pi |h| y0 / |cz + d|^2 >= lo; the box is doubled and then filtered exactly
    s_max = 2.0 * 4.0 * math.pi * hh * y0 / lo
    xdata, y, theta = _coset_coordinates(g, q, s_max)
    weight = F(4.0 * math.pi * hh * y) * G(theta)
    live = weight != 0
    shell = 4.0 * math.pi * hh * y < lo * (1.0 - 1e-9)
    if np.any(live & shell):
        raise RuntimeError("coset enumeration box too small: live terms in the safety shell")
    if xdata[0] == "exact":
        _, nu, n = xdata
        phase = np.exp(2j * math.pi * (np.mod(h * nu[live], n[live]) / n[live]))
    else:
        phase = np.exp(2j * math.pi * h * np.mod(xdata[1][live], 1.0))
    value = complex_fsum(weight[live] * phase)
    return PoincareEval(value, int(live.sum()), q, h, getattr(F, "N", 0.0))


def smooth_linear_form(q: int, h: int, N: float, F: RadialCutoff, G: AngularCutoff) -> complex:
    """(1/4) sum of P(tau) over Gamma_0(q) \\ SL2(Z) representatives with q | c_tau^2 + d_tau^2."""
    total = []
    for tau in gamma0_coset_reps(q):
        c, d = int(tau.c), int(tau.d)
        if (c * c + d * d) % q:
            continue
        total.append(eval_P(tau, q, h, F, G).value)
    return 0.25 * complex_fsum(total) if total else 0j


def bound_rhs(h: int, q: int, N: float, Z: float, delta: float) -> float:
    """h Z^-19 Y^(-1-2 delta) (1 + h^1/2 |log Y|^2 (Y + 1/Y)^1/2 q^-1 (h, q)^1/2 tau(hq)), Y = 4 pi h / N."""
    Y = 4.0 * math.pi * h / N
    inner = 1.0 + math.sqrt(h) * math.log(Y) ** 2 * math.sqrt(Y + 1.0 / Y) / q \
        * math.sqrt(math.gcd(h, q)) * divisor_count(h * q)
    return h * Z ** -19 * Y ** (-1.0 - 2.0 * delta) * inner


@dataclass(frozen=True)
class BoundRow:
    tau_id: int
    absP: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.absP / self.rhs


def default_tau_grid(count: int = 20, q: int = 1, seed: int = 7) -> list[Mat2]:
    rng = np.random.default_rng(seed)
    return [random_sl2z(rng, steps=6) for _ in range(count)]


def bound_report(tau_grid: Sequence[Mat2], q: int, h: int, N: float, Z: float, delta: float,
                 sector: SectorWindow | None = None) -> list[BoundRow]:
    """|P(tau)|, the bound's right side without its implicit constant, and their ratio."""
    if not 0.0 < delta < 0.25:
        raise ValueError("need 0 < delta < 1/4")
    if h >= N ** (1.0 / 3.0):
        raise HypothesisViolatedError(f"h = {h} is not below N^(1/3) = {N ** (1 / 3):.4g}")
    sector = sector or SectorWindow(0.0, 0.5 * math.pi, Z)
    if sector.Z != Z:
        sector = SectorWindow(sector.alpha, sector.beta, Z)
    F, G = build_F(h, N), build_G(sector)
    rhs = bound_rhs(h, q, N, Z, delta)
    return [BoundRow(i, abs(eval_P(tau, q, h, F, G).value), rhs) for i, tau in enumerate(tau_grid)]


def write_bound_csv(rows: Sequence[BoundRow], out: TextIO | None = None) -> str:
    buf = out if out is not None else io.StringIO()
    buf.write(BOUND_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tau_id", "absP", "rhs", "ratio"])
    for r in rows:
        writer.writerow([r.tau_id, f"{r.absP:.15e}", f"{r.rhs:.15e}", f"{r.ratio:.15e}"])
    return buf.getvalue() if out is None else ""


__all__ = [
    "BoundRow",
    "PoincareEval",
    "bound_report",
    "bound_rhs",
    "default_tau_grid",
    "eval_P",
    "smooth_linear_form",
    "write_bound_csv",
]
