"""Special functions: complex log-Gamma, Whittaker W (power series and
Mellin-Barnes), Bessel I_0 and J, Kloosterman sums and Gamma-ratio factors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numtheory import divisor_count, modinv_array
from .errors import ContourTooLowError, ConvergenceError, DegenerateParametersError, PoleError

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _lanczos(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 1/2."""
    w = z - 1.0
    x = np.full(w.shape, _LANCZOS_COEFFS[0], dtype=complex)
    for i in range(1, _LANCZOS_COEFFS.size):
        x = x + _LANCZOS_COEFFS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(x)


def log_gamma(z):
    """Principal branch of log Gamma(z), continuous off the negative real axis.

    Reflection handles Re z < 1/2; the multiple of 2 pi i is fixed so that
    log Gamma(z + 1) = log Gamma(z) + log z holds with principal logarithms.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if pole.any():
        raise PoleError(f"log_gamma has a pole at {z[pole][0]}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos(z[right])
    if (~right).any():
        zl = z[~right]
        refl = _LOG_PI - np.log(np.sin(np.pi * zl)) - _lanczos(1.0 - zl)
        shifts = np.ceil(0.5 - zl.real).astype(int)
        target = _lanczos(zl + shifts).imag
        for k in range(int(shifts.max())):
            active = k < shifts
            target[active] -= np.angle(zl[active] + k)
        turns = np.round((target - refl.imag) / (2.0 * math.pi))
        out[~right] = refl + 2j * math.pi * turns
    return out[0] if scalar else out


def gamma(z):
    return np.exp(log_gamma(z))


@dataclass(frozen=True)
class WhittakerParams:
    """W_{m, mu}(y) with mu = i t; t may be real or purely imaginary."""

    m: float
    t: complex
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("Whittaker argument y must be positive")

    @property
    def mu(self) -> complex:
        return 1j * complex(self.t)


def _is_degenerate(mu: complex) -> bool:
    two_mu = 2.0 * mu
    return abs(two_mu.imag) < 1e-14 and abs(two_mu.real - round(two_mu.real)) < 1e-14


def _kummer_branch(m: float, mu: complex, y: float, tol: float, max_terms: int) -> complex:
    """Gamma(-2mu)/Gamma(1/2 - mu - m) * y^{1/2 + mu} * 1F1(1/2 + mu - m; 1 + 2mu; y)."""
    pref = np.exp(log_gamma(-2.0 * mu) - log_gamma(0.5 - mu - m) + (0.5 + mu) * math.log(y))
    term = 1.0 + 0j
    total = term
    a, b = 0.5 + mu - m, 1.0 + 2.0 * mu
    for k in range(1, max_terms):
        term *= (a + k - 1) * y / (k * (b + k - 1))
        total += term
        if k > y and abs(term) < tol * abs(total):
            return complex(pref * total)
    raise ConvergenceError("Whittaker power series did not converge")


def whittaker_series(params: WhittakerParams, tol: float = 1e-16, max_terms: int = 2000) -> complex:
    """W_{m,it}(y) as the sum of the two conjugate Kummer series."""
    m, mu, y = params.m, params.mu, params.y
    if _is_degenerate(mu):
        raise DegenerateParametersError(f"2 mu = {2 * mu} is an integer; use the Mellin-Barnes form")
    if y > 50:
        raise ValueError("power series limited to y <= 50")
    first = _kummer_branch(m, mu, y, tol, max_terms)
    second = _kummer_branch(m, -mu, y, tol, max_terms)
    return math.exp(-0.5 * y) * (first + second)


def _mb_integrand(r: np.ndarray, m: float, mu: complex, y: float, sigma: float) -> np.ndarray:
    s = sigma + 1j * r
    logs = log_gamma(0.5 + s - mu) + log_gamma(0.5 + s + mu) - log_gamma(1.0 + s - m) - s * math.log(y)
    return np.exp(logs)


def whittaker_mellin_barnes(params: WhittakerParams, sigma: float | None = None,
                            tol: float = 1e-11, tail: float = 1e-13) -> complex:
    """W_{m,it}(y) = e^{y/2} (1/2 pi i) int_{Re s = sigma} G(s) y^{-s} ds, with
    G(s) = Gamma(1/2 + s - mu) Gamma(1/2 + s + mu) / Gamma(1 + s - m).

    Trapezoid rule in r = Im s with the step halved until successive values agree.
    """
    m, mu, y = params.m, params.mu, params.y
    if sigma is None:
        sigma = max(2.0, m + 1.0)
    if sigma <= -0.5 + abs(mu.real):
        raise ContourTooLowError(f"sigma = {sigma} leaves poles at Re s = {-0.5 + abs(mu.real)} to its right")
    peak = abs(_mb_integrand(np.array([0.0]), m, mu, y, sigma)[0])
    R = 8.0
    while True:
        edge = np.abs(_mb_integrand(np.array([-R, R]), m, mu, y, sigma)).max()
        if edge <= tail * peak or R > 2000:
            break
        R *= 1.5
    step = 0.5
    previous = None
    for _ in range(12):
        k = np.arange(-int(math.ceil(R / step)), int(math.ceil(R / step)) + 1)
        values = _mb_integrand(k * step, m, mu, y, sigma)
        scale = math.exp(0.5 * y) * step / (2.0 * math.pi)
        current = complex(scale * np.sum(values))
        # cancellation floor: rounding in the sum of |values| bounds attainable accuracy
        floor = 64.0 * np.finfo(float).eps * scale * float(np.sum(np.abs(values)))
        if previous is not None and abs(current - previous) <= max(tol * abs(current), floor):
            return current
        previous = current
        step *= 0.5
    raise ConvergenceError("Mellin-Barnes quadrature did not settle")


def bessel_I0(x: float, tol: float = 1e-17) -> float:
    """I_0(x) = sum (x/2)^{2k} / (k!)^2."""
    if x < 0:
        raise ValueError("bessel_I0 needs x >= 0")
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term <= tol * total and k > q ** 0.5:
            return total


def bessel_J(nu: complex, x: float, tol: float = 1e-17, max_terms: int = 500) -> complex:
    """J_nu(x) = sum (-1)^k (x/2)^{2k+nu} / (k! Gamma(k + nu + 1)), for moderate x > 0."""
    if x <= 0:
        raise ValueError("bessel_J needs x > 0")
    nu = complex(nu)
    half = 0.5 * x
    lead = np.exp(nu * math.log(half) - log_gamma(nu + 1.0))
    term = 1.0 + 0j
    total = term
    for k in range(1, max_terms):
        term *= -half * half / (k * (k + nu))
        total += term
        if abs(term) <= tol * abs(total) and k > half:
            return complex(lead * total)
    raise ConvergenceError("Bessel J series did not converge")


@dataclass(frozen=True)
class KloostermanValue:
    h: int
    c: int
    value: float


def _units(c: int) -> np.ndarray:
    x = np.arange(1, c + 1, dtype=np.int64)
    return x[np.gcd(x, c) == 1]


def kloosterman(h: int, c: int) -> KloostermanValue:
    """S(h, h; c) = sum over units x mod c of e(h (x + xbar) / c), computed as a cosine sum."""
    if c < 1:
        raise ValueError("c must be >= 1")
    x = _units(c)
    xbar = modinv_array(x, c) if c > 1 else np.zeros_like(x)
    frac = np.mod((h % c) * (x + xbar), c) / c
    return KloostermanValue(h, c, math.fsum(np.cos(2.0 * math.pi * frac)))


def weil_bound(h: int, c: int) -> float:
    return math.sqrt(math.gcd(h, c)) * math.sqrt(c) * divisor_count(c)


def weil_violations(c_max: int = 500, h_max: int = 20,
                    rel_guard: float = 1e-12) -> list[tuple[int, int, float, float]]:
    """(h, c, |S|, bound) for every pair breaking the Weil bound.

    The guard absorbs rounding where the bound is attained (c = 1).
    """
    bad = []
    for c in range(1, c_max + 1):
        x = _units(c)
        xbar = modinv_array(x, c) if c > 1 else np.zeros_like(x)
        s = np.mod(x + xbar, c)
        tau = divisor_count(c)
        for h in range(1, h_max + 1):
            value = math.fsum(np.cos(2.0 * math.pi * np.mod(h * s, c) / c))
            bound = math.sqrt(math.gcd(h, c)) * math.sqrt(c) * tau
            if abs(value) > bound * (1.0 + rel_guard):
                bad.append((h, c, abs(value), bound))
    return bad


def _gamma_pair_abs_log(t: float, k: float) -> float:
    """log |Gamma(1/2 + it + k) Gamma(1/2 - it + k)|."""
    return float(2.0 * log_gamma(0.5 + 1j * t + k).real)


def weight_shift_ratio(t: float, n: int, m: int) -> float:
    """|lambda_m(h)| / |lambda_n(h)| for weights n, m in one representation."""
    if n % 2 or m % 2:
        raise ValueError("weights must be even")
    if abs(n) > abs(m) or n * m < 0:
        raise ValueError("need |n| <= |m| and n m >= 0")
    log_n = _gamma_pair_abs_log(t, abs(n) / 2)
    log_m = _gamma_pair_abs_log(t, abs(m) / 2)
    sign = 1.0 if m >= 0 else -1.0
    return math.exp(0.5 * sign * (log_n - log_m))


@dataclass(frozen=True)
class CDValue:
    k: int
    C: complex
    D: float

    @property
    def bounded(self) -> bool:
        return abs(self.C) <= self.D


def gamma_C_table(k_max: int, t: float, n: int) -> list[CDValue]:
    """C(k) = C(k-1) (-it - n/2 + k - 1/2)/(-2it + k) and D(k) = prod (1 + (|n/2|+1)/j)."""
    if n % 2:
        raise ValueError("n must be even")
    C, D = 1.0 + 0j, 1.0
    out = [CDValue(0, C, D)]
    half = abs(n) // 2
    for k in range(1, k_max + 1):
        C *= (-1j * t - n / 2 + k - 0.5) / (-2j * t + k)
        D *= 1.0 + (half + 1) / k
        out.append(CDValue(k, C, D))
    return out


def gamma_C(k: int, t: float, n: int) -> CDValue:
    if k < 0:
        raise ValueError("k must be >= 0")
    return gamma_C_table(k, t, n)[k]


def reflection_constant(t_grid, n_values) -> float:
    """max of |Gamma(1/2+it+n/2) Gamma(1/2+it-n/2)|^{-1} / cosh(pi t) over the grid."""
    worst = 0.0
    for n in n_values:
        for t in t_grid:
            log_abs = (log_gamma(0.5 + 1j * t + n / 2) + log_gamma(0.5 + 1j * t - n / 2)).real
            worst = max(worst, math.exp(-float(log_abs)) / math.cosh(math.pi * t))
    return worst


def g_K(t, Y: float):
    """(Y^{2it} + Y^{-2it} + 3) / (cosh(pi t) (1 + t^12))."""
    t = np.asarray(t, dtype=complex)
    num = np.exp(2j * t * math.log(Y)) + np.exp(-2j * t * math.log(Y)) + 3.0
    return num / (np.cosh(math.pi * t) * (1.0 + t ** 12))


def bruggeman_motohashi_ratio(n: int, t: complex, y: float, delta: float = 0.1) -> float:
    """LHS / RHS of the small-y Whittaker bound (no implicit constant)."""
    t = complex(t)
    mu = 1j * t
    params = WhittakerParams(n / 2, t, y)
    w = whittaker_mellin_barnes(params) if _is_degenerate(mu) else whittaker_series(params)
    gam = 0.5 * (_log_abs_pair(t, 0) - _log_abs_pair(t, abs(n) / 2))
    sgn = (n > 0) - (n < 0)
    lhs = math.exp(sgn * gam) * abs(w)
    rhs = (abs(n / 2) + abs(mu) + 1.0) * y ** (0.5 - abs(mu.real) - delta)
    return lhs / rhs


def _log_abs_pair(t: complex, k: float) -> float:
    return float((log_gamma(0.5 + 1j * t + k) + log_gamma(0.5 - 1j * t + k)).real)


__all__ = [
    "CDValue",
    "KloostermanValue",
    "WhittakerParams",
    "bessel_I0",
    "bessel_J",
    "bruggeman_motohashi_ratio",
    "g_K",
    "gamma",
    "gamma_C",
    "gamma_C_table",
    "kloosterman",
    "log_gamma",
    "reflection_constant",
    "weight_shift_ratio",
    "weil_bound",
    "weil_violations",
    "whittaker_mellin_barnes",
    "whittaker_series",
]
