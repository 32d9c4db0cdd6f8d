"""Weyl sums over roots of X^2 + 1 in sectors, linear and bilinear forms,
boundary sets and discrepancy."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, TextIO

import numpy as np

from ._numtheory import is_prime
from .bump import AngularCutoff, RadialCutoff
from .errors import EmptyInputError
from .lattice import (
    FULL_SECTOR,
    SectorWindow,
    points_of_norm,
    primitive_arrays,
    roots_of_arrays,
    sequence_Y_arrays,
)

PROFILE_SCHEMA = "# schema: sectorroots.weyl_profile/1"
DISCREPANCY_SCHEMA = "# schema: sectorroots.discrepancy/1"


def e_frac(num, den) -> np.ndarray:
    """e(num/den) = exp(2 pi i num/den), reducing num mod den in integers first."""
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    frac = np.mod(num, den) / den
    return np.exp(2j * np.pi * frac)


def _phases(h: int, nu: np.ndarray, n: np.ndarray) -> np.ndarray:
    # (h mod n) * nu < n^2 keeps the product exact in int64 for n < 3e9
    return e_frac(np.mod(h, n) * nu, n)


def complex_fsum(values) -> complex:
    """Correctly rounded sum of complex values (real and imaginary parts separately)."""
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


@dataclass(frozen=True)
class WeylSumValue:
    value: complex
    terms: int


def rho_h(n: int, h: int, sector: SectorWindow = FULL_SECTOR) -> WeylSumValue:
    """Sum of e(h nu / n) over roots nu whose generating point lies in the sector."""
    if n < 2:
        raise ValueError("rho_h needs n >= 2")
    nus = []
    for p in points_of_norm(n):
        if sector.contains(math.atan2(p.b, p.a)):
            nus.append(pow(p.a, -1, n) * p.b % n)
    if not nus:
        return WeylSumValue(0j, 0)
    nus = np.array(sorted(nus), dtype=np.int64)
    return WeylSumValue(complex_fsum(_phases(h, nus, np.full_like(nus, n))), len(nus))


def _progression_roots(d: int, n_lo: int, n_hi: int, sector: SectorWindow | None):
    """(nu, n, angle) for primitive points with n_lo <= n <= n_hi, d | n, n >= 2."""
    a, b, n, angle = primitive_arrays(n_hi, sector, radius_sq_min=max(n_lo, 2))
    keep = n % d == 0
    a, b, n, angle = a[keep], b[keep], n[keep], angle[keep]
    nu = roots_of_arrays(a, b, n)
    order = np.lexsort((nu, n))
    return nu[order], n[order], angle[order]


def linear_sum(d: int, h: int, N: int, sector: SectorWindow = FULL_SECTOR) -> complex:
    """Sum of rho_h(d n) over all moduli d n <= N (composite moduli included)."""
    if d < 1 or N < d:
        raise ValueError("need d >= 1 and N >= d")
    nu, n, _ = _progression_roots(d, 2, N, sector)
    return complex_fsum(_phases(h, nu, n))


def smooth_linear_sum(d: int, h: int, N: float, F: RadialCutoff, G: AngularCutoff) -> complex:
    """Sum over primitive (a, b) with d | a^2 + b^2 of e(h abar b / n) F(4 pi h / n) G(theta).

    ``N`` is accepted for interface symmetry; the range of n comes from supp F.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    lo, hi = F.support
    n_lo = math.floor(4.0 * math.pi * h / hi)
    n_hi = math.ceil(4.0 * math.pi * h / lo)
    nu, n, angle = _progression_roots(d, max(n_lo, 2), n_hi, None)
    weights = F(4.0 * math.pi * h / n.astype(float)) * G(angle)
    live = weights != 0
    return complex_fsum(weights[live] * _phases(h, nu[live], n[live]))


def bilinear_sum(alpha: Mapping[int, complex], beta: Mapping[int, complex], h: int,
                 sector: SectorWindow = FULL_SECTOR) -> complex:
    """Sum of alpha_m beta_p rho_h(m p); beta must be supported on primes."""
    bad = [p for p, v in beta.items() if v != 0 and not is_prime(p)]
    if bad:
        raise ValueError(f"beta must be supported on primes; got {bad[:5]}")
    terms = []
    for m in sorted(alpha):
        for p in sorted(beta):
            if alpha[m] == 0 or beta[p] == 0 or m * p < 2:
                continue
            terms.append(alpha[m] * beta[p] * rho_h(m * p, h, sector).value)
    return complex_fsum(terms) if terms else 0j


@dataclass
class BoundarySetReport:
    N: int
    d: int
    Z: float
    Delta: float
    radial_count: int
    angular_count: int
    total: int
    xi_alpha: dict = field(default_factory=dict)
    xi_beta: dict = field(default_factory=dict)


def _boundary_masks(n, angle, N, Delta, Z, sector):
    n = np.asarray(n)
    radial = ((n >= N) & (n < N + Delta * N)) | ((n > 2 * N - Delta * N) & (n <= 2 * N))
    angular = ((angle >= sector.alpha) & (angle < sector.alpha + Z)) | (
        (angle > sector.beta - Z) & (angle <= sector.beta)
    )
    return radial, angular


def _xi_profile(N: int, d: int, lo_angle: float, hi_angle: float) -> dict[int, int]:
    """Lattice points of the trapezoid over [lo_angle, hi_angle], column by column."""
    cap = math.isqrt(2 * N)
    x_lo = math.ceil(math.sqrt(N) * math.cos(hi_angle) - 1e-12)
    x_hi = math.floor(math.sqrt(2 * N) * math.cos(lo_angle) + 1e-12)
    out = {}
    for x in range(max(x_lo, 1), x_hi + 1):
        y_lo = math.ceil(x * math.tan(lo_angle) - 1e-12)
        y_hi = cap if hi_angle >= 0.5 * math.pi - 1e-15 else math.floor(x * math.tan(hi_angle) + 1e-12)
        y_hi = min(y_hi, cap)
        y = np.arange(max(y_lo, 0), y_hi + 1)
        out[x] = int(np.count_nonzero((x * x + y * y) % d == 0))
    return out


def boundary_set(N: int, d: int, Z: float, Delta: float, sector: SectorWindow) -> BoundarySetReport:
    """Exact counts of primitive points near the edges of the window [N, 2N] x [alpha, beta].

    Points are primitive with a, b > 0, d | a^2 + b^2, N <= n <= 2N and angle in the
    sector. Radial bands are [N, N + Delta N) and (2N - Delta N, 2N]; angular bands
    are [alpha, alpha + Z) and (beta - Z, beta].
    """
    if not (0.0 <= Delta < 1.0):
        raise ValueError("need 0 <= Delta < 1")
    if not (0.0 <= Z < 0.5 * (sector.beta - sector.alpha)):
        raise ValueError("need 0 <= Z < (beta - alpha)/2")
    a, b, n, angle = primitive_arrays(2 * N, sector, radius_sq_min=N)
    keep = (n % d == 0) & (a > 0) & (b > 0)
    n, angle = n[keep], angle[keep]
    radial, angular = _boundary_masks(n, angle, N, Delta, Z, sector)
    report = BoundarySetReport(
        N=N, d=d, Z=Z, Delta=Delta,
        radial_count=int(radial.sum()),
        angular_count=int(angular.sum()),
        total=int((radial | angular).sum()),
    )
    if Z > 0:
        report.xi_alpha = _xi_profile(N, d, sector.alpha, sector.alpha + Z)
        report.xi_beta = _xi_profile(N, d, sector.beta - Z, sector.beta)
    return report


def discrepancy(roots) -> float:
    """Star discrepancy max_i max(i/N - x_(i), x_(i) - (i-1)/N) of points in [0, 1)."""
    x = np.sort(np.asarray(roots, dtype=float))
    if x.size == 0:
        raise EmptyInputError("discrepancy of an empty sample")
    i = np.arange(1, x.size + 1)
    return float(max(np.max(i / x.size - x), np.max(x - (i - 1) / x.size)))


@dataclass(frozen=True)
class ProfileRow:
    h: int
    value: complex
    normalized_abs: float


def weyl_sums_profile(N: int, h_max: int, sector: SectorWindow = FULL_SECTOR) -> list[ProfileRow]:
    """Normalized Weyl sums |sum e(h nu/p)| / count over Y restricted to the sector, h = 0..h_max."""
    if N < 2 or h_max < 1:
        raise ValueError("need N >= 2 and h_max >= 1")
    nu, n, _ = sequence_Y_arrays(N, sector)
    count = nu.size
    rows = []
    for h in range(h_max + 1):
        if count == 0:
            rows.append(ProfileRow(h, 0j, 0.0))
            continue
        s = complex_fsum(_phases(h, nu, n))
        rows.append(ProfileRow(h, s, 1.0 if h == 0 else abs(s) / count))
    return rows


def write_profile_csv(rows, out: TextIO | None = None) -> str:
    buf = out if out is not None else io.StringIO()
    buf.write(PROFILE_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["h", "real", "imag", "normalized_abs"])
    for r in rows:
        writer.writerow([r.h, f"{r.value.real:.15e}", f"{r.value.imag:.15e}", f"{r.normalized_abs:.15e}"])
    return buf.getvalue() if out is None else ""


def discrepancy_trend(Ns, sector: SectorWindow = FULL_SECTOR) -> list[tuple[int, float]]:
    out = []
    for N in Ns:
        nu, n, _ = sequence_Y_arrays(int(N), sector)
        out.append((int(N), discrepancy(nu / n)))
    return out


def write_discrepancy_csv(rows, out: TextIO | None = None) -> str:
    buf = out if out is not None else io.StringIO()
    buf.write(DISCREPANCY_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "discrepancy"])
    for N, D in rows:
        writer.writerow([N, f"{D:.15e}"])
    return buf.getvalue() if out is None else ""


__all__ = [
    "BoundarySetReport",
    "ProfileRow",
    "WeylSumValue",
    "bilinear_sum",
    "boundary_set",
    "complex_fsum",
    "discrepancy",
    "discrepancy_trend",
    "e_frac",
    "linear_sum",
    "rho_h",
    "smooth_linear_sum",
    "weyl_sums_profile",
    "write_discrepancy_csv",
    "write_profile_csv",
]
