"""Smooth cutoffs: the radial window F on [Y/2, Y] and the angular window G.

Both are products of two smooth steps S(u) = int_0^u phi / int_0^1 phi built from
phi(s) = exp(-a / (s (1 - s))). Derivatives of every order come from Taylor jets:
phi = exp(h) with h = -a (1/s + 1/(1 - s)), whose derivatives are explicit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TextIO

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError, ScaleOutOfRangeError
from .lattice import SectorWindow

HALF_PI = 0.5 * math.pi
RADIAL_KERNEL_A = 0.5
ANGULAR_KERNEL_A = 2.0 * math.pi
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(80)
_EXP_FLOOR = 745.0  # exp(-745) underflows to zero in double precision
FOURIER_SCHEMA = "# schema: sectorroots.fourier/1"


def _exp_jet(h: np.ndarray) -> np.ndarray:
    """Taylor coefficients of exp(f) from those of f; h has shape (K+1, npts)."""
    out = np.zeros_like(h)
    out[0] = np.exp(h[0])
    for k in range(1, h.shape[0]):
        j = np.arange(1, k + 1)[:, None]
        out[k] = (j * h[1 : k + 1] * out[k - 1 :: -1][:k]).sum(axis=0) / k
    return out


def _jet_product(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    for k in range(f.shape[0]):
        out[k] = (f[: k + 1] * g[k::-1]).sum(axis=0)
    return out


@dataclass(frozen=True)
class SmoothStep:
    """S(u): 0 for u <= 0, 1 for u >= 1, smooth and monotone in between."""

    a: float

    @cached_property
    def mass(self) -> float:
        return float(quad(self.phi, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)[0])

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s > 0) & (s < 1)
        safe = np.where(inside, s, 0.5)
        return np.where(inside, np.exp(-self.a / (safe * (1.0 - safe))), 0.0)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.where(u >= 1.0, 1.0, 0.0)
        ramp = (u > 0.0) & (u < 1.0)
        if np.any(ramp):
            v = u[ramp]
            low = np.minimum(v, 1.0 - v)
            nodes = 0.5 * low[:, None] * (_GL_NODES + 1.0)
            partial = 0.5 * low * (self.phi(nodes) @ _GL_WEIGHTS) / self.mass
            out[ramp] = np.where(v <= 0.5, partial, 1.0 - partial)
        return out

    def jet(self, u, order: int) -> np.ndarray:
        """Taylor coefficients S^{(k)}(u)/k! for k = 0..order, shape (order+1, npts)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros((order + 1, u.size))
        out[0] = self(u)
        if order == 0:
            return out
        inside = (u > 0) & (u < 1) & (self.a / (u * (1.0 - u) + 1e-300) < _EXP_FLOOR)
        s = u[inside]
        k = np.arange(order)[:, None]
        h = -self.a * (np.where(k % 2 == 0, 1.0, -1.0) / s ** (k + 1) + 1.0 / (1.0 - s) ** (k + 1))
        phi_jet = _exp_jet(h)
        # S^{(k+1)}/(k+1)! = phi^{(k)}/k! / (k+1) / mass
        out[1:, inside] = phi_jet / (np.arange(1, order + 1)[:, None] * self.mass)
        return out


RADIAL_STEP = SmoothStep(RADIAL_KERNEL_A)
ANGULAR_STEP = SmoothStep(ANGULAR_KERNEL_A)


def _window_jet(step: SmoothStep, x: np.ndarray, lo: float, hi: float, width: float, order: int):
    """Jet of S((x - lo)/width) * S((hi - x)/width)."""
    left = step.jet((x - lo) / width, order)
    right = step.jet((hi - x) / width, order)
    k = np.arange(order + 1)[:, None]
    left *= (1.0 / width) ** k
    right *= (-1.0 / width) ** k
    return _jet_product(left, right)


@dataclass(frozen=True)
class RadialCutoff:
    """F supported in [Y/2, Y], equal to 1 on [5Y/8, 7Y/8]."""

    Y: float
    h: int = 1
    N: float = 0.0

    @property
    def support(self) -> tuple[float, float]:
        return 0.5 * self.Y, self.Y

    @property
    def plateau(self) -> tuple[float, float]:
        return 0.625 * self.Y, 0.875 * self.Y

    @property
    def width(self) -> float:
        return self.Y / 8.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        return RADIAL_STEP((x - lo) / self.width) * RADIAL_STEP((hi - x) / self.width)

    def derivative(self, x, j: int):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lo, hi = self.support
        jet = _window_jet(RADIAL_STEP, x, lo, hi, self.width, j)
        return math.factorial(j) * jet[j]

    def sup_constants(self, j_max: int = 12, samples: int = 20001) -> np.ndarray:
        """Measured C_j = sup |F^{(j)}| * Y^j for j = 0..j_max on a dense grid."""
        lo, hi = self.support
        x = np.linspace(lo, hi, samples)
        jet = _window_jet(RADIAL_STEP, x, lo, hi, self.width, j_max)
        j = np.arange(j_max + 1)
        fact = np.array([math.factorial(int(i)) for i in j], dtype=float)
        return np.abs(jet).max(axis=1) * fact * self.Y ** j

    def weight_on_modulus(self, n, h: int | None = None):
        """F(4 pi h / n), the radial weight seen by a lattice point of norm n."""
        h = self.h if h is None else h
        return self(4.0 * math.pi * h / np.asarray(n, dtype=float))


def build_F(h: int, N: float) -> RadialCutoff:
    if h < 1:
        raise ValueError("h must be >= 1")
    Y = 4.0 * math.pi * h / N
    if Y >= 1.0:
        raise ScaleOutOfRangeError(f"Y = 4 pi h / N = {Y:.4g} must be < 1")
    return RadialCutoff(Y=Y, h=h, N=N)


@dataclass(frozen=True)
class AngularCutoff:
    """G: pi/2-periodic, supported in [alpha, beta] mod pi/2, 1 on [alpha+Z, beta-Z]."""

    alpha: float
    beta: float
    Z: float

    def _reduce(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.alpha + np.mod(theta - self.alpha, HALF_PI)

    def __call__(self, theta):
        t = self._reduce(theta)
        return ANGULAR_STEP((t - self.alpha) / self.Z) * ANGULAR_STEP((self.beta - t) / self.Z)

    def derivative(self, theta, j: int):
        t = np.atleast_1d(self._reduce(theta))
        jet = _window_jet(ANGULAR_STEP, t, self.alpha, self.beta, self.Z, j)
        return math.factorial(j) * jet[j]

    def norm_sq(self, j: int = 0) -> float:
        """(1/2pi) int_0^{2pi} |G^{(j)}|^2, by adaptive quadrature over one period."""
        f = lambda t: float(self.derivative(t, j)[0]) ** 2 if j else float(self(t)) ** 2
        pieces = [
            (self.alpha, self.alpha + self.Z),
            (self.beta - self.Z, self.beta),
        ]
        total = 0.0
        for lo, hi in pieces:
            val, err = quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
            total += val
        if j == 0:
            total += (self.beta - self.alpha - 2.0 * self.Z)
        # four periods per circle, normalized by 2 pi
        return 4.0 * total / (2.0 * math.pi)


def build_G(sector: SectorWindow) -> AngularCutoff:
    if sector.Z <= 0:
        raise ValueError("smooth angular cutoff needs Z > 0")
    return AngularCutoff(sector.alpha, sector.beta, sector.Z)


@dataclass
class FourierTable:
    n: np.ndarray
    coeffs: np.ndarray
    samples: int
    norm_sq: float = field(default=float("nan"))

    def __getitem__(self, k: int) -> complex:
        return complex(self.coeffs[k + self.n_max])

    @property
    def n_max(self) -> int:
        return int(self.n[-1])

    def parseval_sum(self, weight_power: int = 0) -> float:
        w = np.abs(self.n).astype(float) ** weight_power if weight_power else 1.0
        return float(np.sum(w * np.abs(self.coeffs) ** 2))

    def to_csv(self, out: TextIO | None = None) -> str:
        buf = out if out is not None else io.StringIO()
        buf.write(FOURIER_SCHEMA + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "re", "im", "abs"])
        for k, c in zip(self.n, self.coeffs):
            writer.writerow([int(k), f"{c.real:.15e}", f"{c.imag:.15e}", f"{abs(c):.15e}"])
        return buf.getvalue() if out is None else ""


def fourier_coeffs(G: AngularCutoff, n_max: int, tol: float = 1e-13,
                   max_samples: int = 1 << 22) -> FourierTable:
    """g_n = (1/2pi) int G e^{-in theta}, |n| <= n_max.

    G is smooth and pi/2-periodic, so the trapezoid rule on one period converges
    faster than any power; the sample count doubles until the coefficients settle.
    Only n = 0 mod 4 can be nonzero.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    m_max = n_max // 4
    samples = max(64, 1 << int(math.ceil(math.log2(4 * m_max + 8))))
    previous = None
    while samples <= max_samples:
        theta = G.alpha + HALF_PI * np.arange(samples) / samples
        values = G(theta)
        spectrum = np.fft.fft(values) / samples
        # coefficient of e^{i 4 m theta} on the period starting at alpha
        m = np.arange(-m_max, m_max + 1)
        current = spectrum[np.mod(m, samples)] * np.exp(-4j * m * G.alpha)
        if previous is not None and np.max(np.abs(current - previous)) <= tol:
            break
        previous = current
        samples *= 2
    else:
        raise QuadratureError(f"Fourier coefficients did not settle with {max_samples} samples")
    n = np.arange(-n_max, n_max + 1)
    coeffs = np.zeros(n.size, dtype=complex)
    coeffs[np.mod(n, 4) == 0] = current
    return FourierTable(n=n, coeffs=coeffs, samples=samples)


def fitted_decay(table: FourierTable, Z: float, floor: float = 1e-14):
    """Fit log|g_n| = log C - kappa sqrt(n Z) over coefficients above ``floor``.

    Returns (kappa, log_C_envelope) where the envelope constant makes
    log|g_n| <= log C - 2 sqrt(pi n Z) hold for every listed n.
    """
    n = table.n
    mags = np.abs(table.coeffs)
    keep = (n > 0) & (mags > floor)
    x = np.sqrt(n[keep] * Z)
    y = np.log(mags[keep])
    slope, _ = np.polyfit(x, y, 1)
    log_c = float(np.max(y + 2.0 * math.sqrt(math.pi) * x))
    return float(-slope), log_c


def norm_constants(sector_alpha: float, sector_beta: float, Z: float, j_max: int = 10) -> np.ndarray:
    """C_j = ||G^{(j)}||^2 * Z^{2j-1} for j = 1..j_max (index 0 unused, set to nan)."""
    G = AngularCutoff(sector_alpha, sector_beta, Z)
    out = np.full(j_max + 1, np.nan)
    for j in range(1, j_max + 1):
        out[j] = G.norm_sq(j) * Z ** (2 * j - 1)
    return out


__all__ = [
    "ANGULAR_KERNEL_A",
    "AngularCutoff",
    "FourierTable",
    "RADIAL_KERNEL_A",
    "RadialCutoff",
    "SmoothStep",
    "build_F",
    "build_G",
    "fitted_decay",
    "fourier_coeffs",
    "norm_constants",
]
