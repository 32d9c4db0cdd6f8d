"""A non-spherical Selberg test function and its inverse transform.

The spectral side is a signed sum of Lorentzians

    rho_X(t) = sum_j s_j / (t^2 + f_j^2),   f_j = r_j X,

with five positive scales (a, b, c, d, 2.5) and five negative ones (1, ..., 5).
The inverse pipeline is closed form up to Q:

    g(u) = sum_j s_j (pi / f_j) exp(-f_j |u|),   Q(x) = g(A(x)),  A(x) = arccosh(1 + x/2),

and Phi_n comes from one radial quadrature of Q'. Phi is a function of the
point-pair variable x = |z - w|^2 / (Im z Im w), which is 4u for the hyperbolic
quantity u = |z - w|^2 / (4 Im z Im w).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence, TextIO

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import (
    ConvergenceError,
    FitIllConditionedError,
    PoleError,
    PositivityUnattainableError,
    QuadratureError,
)
from .modular import Mat2, iwasawa

X0_DEFAULT = 100.0
NEGATIVE_SCALES = (1.0, 2.0, 3.0, 4.0, 5.0)
FIXED_POSITIVE_SCALE = 2.5
# Rotation phases enter the kernel as exp(KERNEL_THETA_SIGN * i n (theta_g - theta_h)).
KERNEL_THETA_SIGN = -1
PHI_SCHEMA = "# schema: sectorroots.phi_table/1"

_GL20 = np.polynomial.legendre.leggauss(20)


# ---------------------------------------------------------------------------
# quartic power sums


@dataclass(frozen=True)
class QuarticRoots:
    a2: float
    b2: float
    c2: float
    d2: float
    exact: tuple = field(default=(), repr=False, compare=False)

    def squares(self) -> np.ndarray:
        return np.array([self.a2, self.b2, self.c2, self.d2])

    def scales(self) -> np.ndarray:
        return np.sqrt(self.squares())

    def residuals(self) -> np.ndarray:
        """Power-sum residuals sum u^k - target_k, k = 1..4, in high precision when available."""
        u = self.exact or tuple(mp.mpf(v) for v in self.squares())
        with mp.workdps(40):
            return np.array([float(sum(v ** k for v in u) - _power_sum_target(k)) for k in range(1, 5)])


def _power_sum_target(k: int):
    """sum_{j=1..5} j^{2k} - 2.5^{2k}, exact as an mpmath number."""
    return mp.mpf(sum(j ** (2 * k) for j in range(1, 6))) - mp.mpf("6.25") ** k


def solve_quartic_power_sums(dps: int = 40, max_iter: int = 200) -> QuarticRoots:
    """The four positive u = a^2, ..., d^2 with prescribed power sums p_1..p_4.

    Newton's identities turn the power sums into elementary symmetric functions;
    the quartic's roots are then polished by Newton's method on the power-sum system.
    """
    with mp.workdps(dps):
        p = [None] + [_power_sum_target(k) for k in range(1, 5)]
        e = [mp.mpf(1)]
        for k in range(1, 5):
            e.append(sum((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)) / k)
        coeffs = [mp.mpf(1), -e[1], e[2], -e[3], e[4]]
        roots = sorted(mp.re(r) for r in mp.polyroots(coeffs, maxsteps=200, extraprec=2 * dps))
        u = mp.matrix(roots)
        for _ in range(max_iter):
            F = mp.matrix([sum(u[i] ** k for i in range(4)) - p[k] for k in range(1, 5)])
            if mp.norm(F) < mp.mpf(10) ** (-(dps - 5)):
                break
            J = mp.matrix(4, 4)
            for k in range(1, 5):
                for i in range(4):
                    J[k - 1, i] = k * u[i] ** (k - 1)
            u = u - mp.lu_solve(J, F)
        else:
            raise ConvergenceError("power-sum Newton iteration did not converge")
        exact = tuple(sorted(u[i] for i in range(4)))
    if min(exact) <= 0:
        raise ConvergenceError("power-sum system produced a nonpositive root")
    return QuarticRoots(*(float(v) for v in exact), exact=exact)


# ---------------------------------------------------------------------------
# the Lorentzian family


def _asinh_half_sqrt(x):
    return 2.0 * np.arcsinh(0.5 * np.sqrt(x))


@dataclass(frozen=True)
class LorentzianSum:
    """sum_j s_j / (t^2 + f_j^2) and its closed-form g and Q."""

    signs: tuple
    f: tuple

    @cached_property
    def _s(self) -> np.ndarray:
        return np.asarray(self.signs, dtype=float)

    @cached_property
    def _f(self) -> np.ndarray:
        return np.asarray(self.f, dtype=float)

    @property
    def f_min(self) -> float:
        return float(self._f.min())

    @property
    def f_max(self) -> float:
        return float(self._f.max())

    def scaled(self, factor: float) -> "LorentzianSum":
        return LorentzianSum(self.signs, tuple(factor * v for v in self.f))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        T = t * t
        F = self._f ** 2
        if np.any(np.isclose(T[..., None], -F, rtol=1e-14, atol=0.0)):
            raise PoleError("t^2 = -f^2 hits a Lorentzian pole")
        direct = np.sum(self._s / (T[..., None] + F), axis=-1)
        far = np.abs(T) > 16.0 * F.max()
        if np.any(far):
            direct = np.where(far, self._far_series(np.where(far, T, 32.0 * F.max())), direct)
        return direct.real if np.all(np.isreal(t)) else direct

    def _far_series(self, T):
        """Expansion in 1/T; the power sums of the f_j^2 that vanish are dropped exactly."""
        scale = float(np.max(self._f ** 2))
        F = self._f ** 2 / scale
        u = scale / T
        total = np.zeros_like(u)
        for k in range(0, 80):
            pk = float(np.sum(self._s * F ** k))
            if k < 5 and abs(pk) <= 1e-9 * float(np.sum(F ** k)):
                continue
            term = (-1) ** k * pk * u ** (k + 1)
            total = total + term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                break
        return total / scale

    def g(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        return np.sum(self._s * math.pi / self._f * np.exp(-self._f * u[..., None]), axis=-1)

    def Q(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ValueError("Q is defined for x >= 0")
        return self.g(_asinh_half_sqrt(x))

    def Q_prime(self, x):
        """Q'(x) = -pi S(A) / sqrt(x (x + 4)), S(A) = sum s_j exp(-f_j A)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        A = _asinh_half_sqrt(x)
        out = np.empty_like(x)
        near = self.f_min * A < 1.0
        if np.any(near):
            # sum s_j = 0, so S(A) = sum s_j expm1(-f_j A) avoids cancellation
            a = A[near]
            with np.errstate(invalid="ignore", divide="ignore"):
                s_over_a = np.sum(self._s * np.expm1(-self._f * a[:, None]), axis=-1) / a
                ratio = a / np.sqrt(x[near] * (x[near] + 4.0))
            zero = a == 0
            s_over_a[zero] = -float(np.sum(self._s * self._f))
            ratio[zero] = 0.5
            out[near] = -math.pi * s_over_a * ratio
        if np.any(~near):
            a = A[~near]
            f0 = self.f_min
            S = np.exp(-f0 * a) * np.sum(self._s * np.exp(-(self._f - f0) * a[:, None]), axis=-1)
            out[~near] = -math.pi * S / np.sqrt(x[~near] * (x[~near] + 4.0))
        return out

    def phi(self, n: int, x: float, epsrel: float = 1e-11) -> float:
        """Phi_n(x) = -(1/pi) int_R Q'(x + r^2) ((sqrt(x+4+r^2) - r)/(sqrt(x+4+r^2) + r))^{n/2} dr."""
        if x < 0:
            raise ValueError("Phi is defined for x >= 0")
        n = abs(int(n))
        # the integrand decays like r^(n - 2 f_min - 2)
        if n >= 2.0 * self.f_min + 1.0:
            raise QuadratureError(f"Phi_{n} diverges for f_min = {self.f_min:.4g}; the scale is too small")
        A0 = float(_asinh_half_sqrt(x))
        root = math.sqrt(x + 4.0)

        def integrand(r):
            return float(self.Q_prime(x + r * r)[0]) * math.cosh(n * math.asinh(r / root))

        def radius_for(delta):
            return math.sqrt(max(4.0 * math.sinh(0.5 * (A0 + delta)) ** 2 - x, 0.0))

        delta = 60.0 / self.f_min
        R = radius_for(delta)
        peak = abs(integrand(0.0))
        for _ in range(40):
            if abs(integrand(R)) <= 1e-22 * peak or peak == 0.0:
                break
            delta *= 1.5
            R = radius_for(delta)
        breaks = sorted({radius_for(d / self.f_min) for d in (0.5, 2.0, 8.0, 24.0)} - {0.0})
        breaks = [b for b in breaks if 0.0 < b < R]
        val, err = quad(integrand, 0.0, R, points=breaks or None, epsabs=0.0, epsrel=epsrel, limit=1000)
        if not np.isfinite(val) or (err > 1e-7 * abs(val) and err > 1e-300):
            raise QuadratureError(f"Phi_{n}({x}) quadrature error {err:.3g} against value {val:.3g}")
        return -2.0 * val / math.pi

    def phi_many(self, n: int, xs) -> np.ndarray:
        return np.array([self.phi(n, float(v)) for v in np.atleast_1d(xs)])


def lorentzian_family(X: float, roots: QuarticRoots | None = None) -> LorentzianSum:
    roots = roots or default_roots()
    positive = tuple(float(v) * X for v in roots.scales()) + (FIXED_POSITIVE_SCALE * X,)
    negative = tuple(v * X for v in NEGATIVE_SCALES)
    return LorentzianSum((1.0,) * 5 + (-1.0,) * 5, positive + negative)


_ROOTS_CACHE: list[QuarticRoots] = []


def default_roots() -> QuarticRoots:
    if not _ROOTS_CACHE:
        _ROOTS_CACHE.append(solve_quartic_power_sums())
    return _ROOTS_CACHE[0]


def rho_X(t, X: float, roots: QuarticRoots | None = None):
    return lorentzian_family(X, roots)(t)


@dataclass(frozen=True)
class SpectralTestFunction:
    """rho(t, n) = w_n rho_{X_n}(t) for even n, zero for odd n.

    w_0 = 1, w_n = C / (1200 (n^10 + 1)); X_n = X0 for n = 0 and (|n| + 2) X0 otherwise.
    """

    X0: float = X0_DEFAULT
    C: float = 1.0
    roots: QuarticRoots | None = None

    def X_n(self, n: int) -> float:
        return self.X0 if n == 0 else (abs(n) + 2) * self.X0

    def weight(self, n: int) -> float:
        if n % 2:
            return 0.0
        return 1.0 if n == 0 else self.C / (1200.0 * (float(n) ** 10 + 1.0))

    def family(self, n: int) -> LorentzianSum:
        return lorentzian_family(self.X_n(n), self.roots or default_roots())

    def __call__(self, t, n: int):
        if n % 2:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        return self.weight(n) * self.family(n)(t)


def rho(t, n: int, C: float = 1.0, X0: float = X0_DEFAULT):
    return SpectralTestFunction(X0=X0, C=C)(t, n)


# ---------------------------------------------------------------------------
# the inversion recipe


def fourier_invert(rho_fixed_n, u: float, method: str = "auto") -> float:
    """g(u) = int rho(t) e^{-itu} dt; closed form for Lorentzian sums, otherwise quadrature.

    The quadrature path assumes rho is real and even in t.
    """
    if isinstance(rho_fixed_n, LorentzianSum) and method in ("auto", "closed"):
        return float(rho_fixed_n.g(u))
    f = (lambda t: float(np.real(rho_fixed_n(t))))
    if u == 0:
        val, _ = quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=1000)
    else:
        val, _ = quad(f, 0.0, np.inf, weight="cos", wvar=abs(u), epsabs=1e-15, limlst=200)
    return 2.0 * val


def Q_of(g: Callable[[float], float], x: float) -> float:
    if x < 0:
        raise ValueError("Q is defined for x >= 0")
    return g(math.acosh(0.5 * x + 1.0))


def phi_of(family: LorentzianSum, n: int, x: float) -> float:
    return family.phi(n, x)


def q_recovery(family: LorentzianSum, n: int, w: float = 0.0) -> complex:
    """Q_n(w) = int Phi_n(w + v^2) ((sqrt(w+4) + iv)/(sqrt(w+4) - iv))^{n/2} dv, from Phi."""
    root = math.sqrt(w + 4.0)
    A0 = float(_asinh_half_sqrt(w))
    V = math.sqrt(4.0 * math.sinh(0.5 * (A0 + 45.0 / family.f_min)) ** 2 - w)

    def integrand(v):
        return family.phi(n, w + v * v) * math.cos(n * math.atan(v / root))

    breaks = [math.sqrt(max(4.0 * math.sinh(0.5 * (A0 + d / family.f_min)) ** 2 - w, 0.0)) for d in (1.0, 5.0, 15.0)]
    val, _ = quad(integrand, 0.0, V, points=[b for b in breaks if 0 < b < V], epsabs=0.0, epsrel=1e-10, limit=400)
    return 2.0 * val


# ---------------------------------------------------------------------------
# puiseux coefficients of Q


HALF_INTEGER_ORDERS = (0.5, 1.5, 2.5, 3.5, 4.5)


def _q_series_value(family_scales, signs, x):
    A = 2 * mp.asinh(mp.sqrt(x) / 2)
    return sum(s * mp.e ** (-f * A) / f for s, f in zip(signs, family_scales))


def puiseux_fit(X: float = 1.0, s_max: float = math.sqrt(0.05), degree: int = 20,
                roots: QuarticRoots | None = None, dps: int = 60) -> dict[float, float]:
    """Coefficients of x^{k/2}, k = 0..degree, of Q(x)/pi by interpolation in s = sqrt(x).

    Chebyshev nodes on (0, s_max] are used; high working precision keeps the
    Vandermonde solve stable.
    """
    roots = roots or default_roots()
    with mp.workdps(dps):
        pos = [mp.sqrt(v) for v in (roots.exact or tuple(mp.mpf(u) for u in roots.squares()))]
        scales = [v * X for v in pos] + [mp.mpf("2.5") * X] + [mp.mpf(j) * X for j in range(1, 6)]
        signs = [1] * 5 + [-1] * 5
        m = degree + 1
        nodes = [mp.mpf(s_max) * (1 + mp.cos(mp.pi * (2 * i + 1) / (2 * m))) / 2 for i in range(m)]
        V = mp.matrix(m, m)
        rhs = mp.matrix(m, 1)
        for i, s in enumerate(nodes):
            for k in range(m):
                V[i, k] = s ** k
            rhs[i] = _q_series_value(scales, signs, s * s)
        coeffs = mp.lu_solve(V, rhs)
        return {k / 2: float(coeffs[k]) for k in range(m)}


def puiseux_exact(X: float = 1.0, order: int = 20, roots: QuarticRoots | None = None,
                  dps: int = 50) -> dict[float, float]:
    """Exact coefficients via the Taylor series in s = sqrt(x) of exp(-2 f asinh(s/2)) / f."""
    roots = roots or default_roots()
    with mp.workdps(dps):
        pos = [mp.sqrt(v) for v in (roots.exact or tuple(mp.mpf(u) for u in roots.squares()))]
        scales = [v * X for v in pos] + [mp.mpf("2.5") * X] + [mp.mpf(j) * X for j in range(1, 6)]
        signs = [1] * 5 + [-1] * 5
        total = [mp.mpf(0)] * (order + 1)
        for s, f in zip(signs, scales):
            series = mp.taylor(lambda v: mp.e ** (-2 * f * mp.asinh(v / 2)) / f, 0, order)
            total = [a + s * b for a, b in zip(total, series)]
        return {k / 2: float(total[k]) for k in range(order + 1)}


def single_term_coefficient(f: float, order: float, dps: int = 40) -> float:
    """Coefficient of x^order in Q_f(x)/pi for a single Lorentzian of scale f."""
    k = int(round(2 * order))
    with mp.workdps(dps):
        series = mp.taylor(lambda v: mp.e ** (-2 * mp.mpf(f) * mp.asinh(v / 2)) / mp.mpf(f), 0, k)
        return float(series[k])


@dataclass
class PuiseuxReport:
    coefficients: dict
    scale: dict
    relative: dict
    fit_spread: float

    @property
    def max_relative(self) -> float:
        return max(self.relative.values())


def puiseux_halfinteger_coeffs(X: float = 1.0, orders: Sequence[float] = HALF_INTEGER_ORDERS,
                               roots: QuarticRoots | None = None) -> PuiseuxReport:
    """Half-integer Puiseux coefficients of the combined Q/pi, relative to single-term sizes.

    Two nested fitting windows are compared; disagreement beyond 1e-8 of the
    single-term scale signals an ill-conditioned fit.
    """
    roots = roots or default_roots()
    fit = puiseux_fit(X, roots=roots)
    check = puiseux_fit(X, s_max=math.sqrt(0.025), roots=roots)
    fam = lorentzian_family(X, roots)
    scale = {o: max(abs(single_term_coefficient(f, o)) for f in fam.f) for o in orders}
    spread = max(abs(fit[o] - check[o]) / scale[o] for o in orders)
    if spread > 1e-8:
        raise FitIllConditionedError(f"Puiseux fits disagree by {spread:.3g} of the term scale")
    coeffs = {o: fit[o] for o in orders}
    return PuiseuxReport(coeffs, scale, {o: abs(coeffs[o]) / scale[o] for o in orders}, spread)


# ---------------------------------------------------------------------------
# point-pair invariants


def hejhal_x(z: complex, w: complex) -> float:
    """|z - w|^2 / (Im z Im w), i.e. 4u."""
    return abs(z - w) ** 2 / (z.imag * w.imag)


def u_of(z: complex, w: complex) -> float:
    return 0.25 * hejhal_x(z, w)


def H_n(z: complex, w: complex, n: int) -> complex:
    q = w - z.conjugate()
    return (1j) ** n * (q / abs(q)) ** n


def kernel_phase(g: Mat2, h: Mat2, n: int) -> complex:
    cg, ch = iwasawa(g), iwasawa(h)
    return H_n(cg.z, ch.z, n) * np.exp(KERNEL_THETA_SIGN * 1j * n * (cg.theta - ch.theta))


def point_pair_kn(g: Mat2, h: Mat2, n: int, phi: Callable[[float], float]) -> complex:
    """k_n(g, h) = Phi_n(4u) H_n(z_g, z_h) exp(-i n (theta_g - theta_h))."""
    cg, ch = iwasawa(g), iwasawa(h)
    return phi(hejhal_x(cg.z, ch.z)) * kernel_phase(g, h, n)


@dataclass
class KernelValue:
    k0: float
    tail: float
    imag_sum: float = 0.0
    real_sum: float = 0.0

    @property
    def margin(self) -> float:
        return self.k0 - self.tail


def point_pair_k(g: Mat2, h: Mat2, n_max: int, spectral: SpectralTestFunction | None = None) -> KernelValue:
    """Weight-0 term and the weighted tail sum_{0 < |n| <= n_max} |k_n| (even n)."""
    spectral = spectral or SpectralTestFunction()
    x = hejhal_x(iwasawa(g).z, iwasawa(h).z)
    k0 = spectral.family(0).phi(0, x)
    tail = 0.0
    total = complex(k0)
    for n in range(2, n_max + 1, 2):
        w = spectral.weight(n)
        if w == 0.0:
            continue
        value = spectral.family(n).phi(n, x)
        # Phi_{-n} = Phi_n, so k_n + k_{-n} pairs the two phases
        total += w * value * (kernel_phase(g, h, n) + kernel_phase(g, h, -n))
        tail += 2.0 * w * abs(value)
    return KernelValue(k0=float(k0), tail=tail, imag_sum=float(total.imag), real_sum=float(total.real))


# ---------------------------------------------------------------------------
# forward transform


@dataclass
class PointPairTable:
    """Phi_n sampled on a uniform grid in the geodesic radius r, with x = 4 sinh^2(r/2)."""

    n: int
    r: np.ndarray
    values: np.ndarray

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.r, self.values)

    @property
    def x(self) -> np.ndarray:
        return 4.0 * np.sinh(0.5 * self.r) ** 2

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def __call__(self, x):
        r = _asinh_half_sqrt(np.asarray(x, dtype=float))
        return np.where(r <= self.r_max, self._spline(np.minimum(r, self.r_max)), 0.0)

    def at_radius(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.r_max, self._spline(np.minimum(r, self.r_max)), 0.0)

    def scaled(self, factor: float) -> "PointPairTable":
        return PointPairTable(self.n, self.r, factor * self.values)

    def to_csv(self, out: TextIO | None = None) -> str:
        """Rows ``n,u,phi`` with u = x/4 and phi = Phi_n(x)."""
        buf = out if out is not None else io.StringIO()
        buf.write(PHI_SCHEMA + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "u", "phi"])
        for x, v in zip(self.x, self.values):
            writer.writerow([self.n, f"{0.25 * x:.15e}", f"{v:.15e}"])
        return buf.getvalue() if out is None else ""


def radius_cutoff(family: LorentzianSum, rel: float = 1e-16) -> float:
    """Geodesic radius beyond which |Q'| < rel |Q'(0)| (exp(-f_min r) decay)."""
    return -math.log(rel) / family.f_min + 8.0 / family.f_max


@lru_cache(maxsize=64)
def build_phi_table(family: LorentzianSum, n: int, samples: int = 256, r_max: float | None = None) -> PointPairTable:
    """Phi_n on a uniform radius grid; cached, since tables are immutable and reused across t."""
    r_max = radius_cutoff(family) if r_max is None else r_max
    r = np.linspace(0.0, r_max, samples)
    x = 4.0 * np.sinh(0.5 * r) ** 2
    return PointPairTable(n, r, family.phi_many(n, x))


def forward_transform(phi: PointPairTable | Callable, n: int, t: float, r_max: float | None = None,
                      panels: int = 24, angular_samples: int = 128) -> complex:
    """rho(t) recovered from Phi_n by integrating the weight-n kernel against y^{1/2+it}.

    Geodesic polar coordinates about i: z = i (1 + w)/(1 - w), w = tanh(r/2) e^{i phi},
    Haar measure sinh r dr dphi. The rotation variable integrates to 2 pi against the
    matching phase, and the full Haar integral carries a factor 4 pi^2, so the
    remaining (r, phi) integral is divided by 2 pi.
    """
    if isinstance(phi, PointPairTable):
        r_max = phi.r_max if r_max is None else r_max
        radial = phi.at_radius
    else:
        if r_max is None:
            raise ValueError("r_max is required when Phi is given as a function of x")
        radial = lambda r: np.array([phi(float(v)) for v in 4.0 * np.sinh(0.5 * np.atleast_1d(r)) ** 2])
    nodes, weights = _GL20
    edges = np.linspace(0.0, r_max, panels + 1)
    r = (0.5 * (edges[1:] - edges[:-1])[:, None] * (nodes + 1.0) + edges[:-1, None]).ravel()
    wr = (0.5 * (edges[1:] - edges[:-1])[:, None] * weights).ravel()
    ang = 2.0 * math.pi * np.arange(angular_samples) / angular_samples
    w = np.tanh(0.5 * r)[:, None] * np.exp(1j * ang)[None, :]
    z = 1j * (1.0 + w) / (1.0 - w)
    q = z + 1j
    H = (1j) ** n * (q / np.abs(q)) ** n
    y = z.imag
    inner = (H * y ** (0.5 + 1j * t)).mean(axis=1) * 2.0 * math.pi
    total = np.sum(wr * np.sinh(r) * radial(r) * inner)
    return complex(total / (2.0 * math.pi))


@dataclass
class RoundTripResult:
    n: int
    t: float
    X: float
    expected: float
    recovered: complex
    samples: int

    @property
    def rel_error(self) -> float:
        return abs(self.recovered.real - self.expected) / abs(self.expected)


def selberg_roundtrip(n: int, t: float, X: float, roots: QuarticRoots | None = None,
                      samples: int = 128, tol: float = 1e-6, max_samples: int = 4096) -> RoundTripResult:
    """rho_X -> g -> Q -> Phi_n -> forward transform, doubling the Phi table until stable."""
    if n % 2:
        raise ValueError("odd weights carry no test function")
    family = lorentzian_family(X, roots)
    expected = float(family(t))
    previous = None
    while True:
        table = build_phi_table(family, n, samples)
        value = forward_transform(table, n, t)
        if previous is not None and abs(value - previous) <= tol * abs(value):
            return RoundTripResult(n, t, X, expected, value, samples)
        if samples >= max_samples:
            raise QuadratureError(f"forward transform unstable at {samples} samples")
        previous = value
        samples *= 2


# ---------------------------------------------------------------------------
# positivity


def positivity_pairs(count: int = 100, seed: int = 20240611, d_min: float = 1e-5,
                     d_max: float = 3.0) -> list[tuple[Mat2, Mat2]]:
    """(g, h) pairs: one coincident pair and count-1 pairs at log-spaced hyperbolic distances."""
    from .modular import dilation, rotation, translation

    rng = np.random.default_rng(seed)
    pairs = []

    def random_frame():
        return translation(float(rng.uniform(-2, 2))) @ dilation(float(np.exp(rng.uniform(-1.5, 1.5)))) \
            @ rotation(float(rng.uniform(0, 2 * math.pi)))

    g = random_frame()
    pairs.append((g, g))
    for d in np.geomspace(d_min, d_max, count - 1):
        g = random_frame()
        # move from g(i) a hyperbolic distance d along a random direction, then rotate freely
        h = g @ rotation(float(rng.uniform(0, 2 * math.pi))) @ dilation(float(np.exp(d))) \
            @ rotation(float(rng.uniform(0, 2 * math.pi)))
        pairs.append((g, h))
    return pairs


@dataclass
class PositivityReport:
    C: float
    n_max: int
    x: np.ndarray
    k0: np.ndarray
    tail: np.ndarray

    @property
    def margin(self) -> np.ndarray:
        return self.k0 - self.C * self.tail

    @property
    def min_margin(self) -> float:
        return float(self.margin.min())

    @property
    def min_relative_margin(self) -> float:
        return float((self.margin / self.k0).min())


def _unit_tails(spectral: SpectralTestFunction, xs: np.ndarray, n_max: int) -> np.ndarray:
    """sum over 0 < |n| <= n_max of |Phi_n(x)| / (1200 (n^10 + 1)), i.e. the tail at C = 1."""
    unit = SpectralTestFunction(X0=spectral.X0, C=1.0, roots=spectral.roots)
    tails = np.zeros(xs.size)
    for n in range(2, n_max + 1, 2):
        fam = unit.family(n)
        tails += 2.0 * unit.weight(n) * np.abs(fam.phi_many(n, xs))
    return tails


def pair_distances(pairs) -> np.ndarray:
    return np.array([hejhal_x(iwasawa(g).z, iwasawa(h).z) for g, h in pairs])


def calibrate_C(pairs, n_max: int = 40, spectral: SpectralTestFunction | None = None) -> PositivityReport:
    """Largest C <= 1 with k_0 >= sum_{n != 0} |k_n| at every pair; C = 0 is the trivial case."""
    spectral = spectral or SpectralTestFunction()
    xs = pair_distances(pairs)
    k0 = spectral.family(0).phi_many(0, xs)
    if np.any(k0 <= 0):
        raise PositivityUnattainableError(f"k_0 <= 0 at x = {xs[k0 <= 0][0]:.4g}")
    tails = _unit_tails(spectral, xs, n_max)
    with np.errstate(divide="ignore"):
        ratios = np.where(tails > 0, k0 / tails, np.inf)
    C = float(min(1.0, ratios.min()))
    if not C > 0:
        raise PositivityUnattainableError("no positive C satisfies the grid")
    return PositivityReport(C=C, n_max=n_max, x=xs, k0=k0, tail=tails)


def positivity_certificate(pairs, C: float, n_max: int, spectral: SpectralTestFunction | None = None) -> PositivityReport:
    spectral = spectral or SpectralTestFunction()
    xs = pair_distances(pairs)
    k0 = spectral.family(0).phi_many(0, xs)
    tails = _unit_tails(spectral, xs, n_max) if C else np.zeros(xs.size)
    return PositivityReport(C=C, n_max=n_max, x=xs, k0=k0, tail=tails)


def truncation_sensitivity(pairs, spectral: SpectralTestFunction | None = None,
                           n_lo: int = 40, n_hi: int = 80) -> float:
    """max relative change of the tail when the weight cutoff grows from n_lo to n_hi."""
    spectral = spectral or SpectralTestFunction()
    xs = pair_distances(pairs)
    lo = _unit_tails(spectral, xs, n_lo)
    extra = np.zeros(xs.size)
    unit = SpectralTestFunction(X0=spectral.X0, C=1.0, roots=spectral.roots)
    for n in range(n_lo + 2, n_hi + 1, 2):
        extra += 2.0 * unit.weight(n) * np.abs(unit.family(n).phi_many(n, xs))
    live = lo > 0
    return float(np.max(extra[live] / lo[live])) if np.any(live) else 0.0


def bound_window(spectral: SpectralTestFunction | None = None, t_grid=None, n_grid=None) -> tuple[float, float]:
    """Fitted A, B with rho <= A / ((t^2+n^2)^6 + 1) and 1/rho <= B (t^12 + n^12 + 1)."""
    spectral = spectral or SpectralTestFunction()
    t_grid = np.linspace(0.0, 50.0, 101) if t_grid is None else np.asarray(t_grid, dtype=float)
    n_grid = range(0, 51, 2) if n_grid is None else n_grid
    A = B = 0.0
    for n in n_grid:
        values = np.asarray(spectral(t_grid, n), dtype=float)
        if np.any(values <= 0):
            return math.inf, math.inf
        A = max(A, float(np.max(values * ((t_grid ** 2 + n * n) ** 6 + 1.0))))
        B = max(B, float(np.max(1.0 / (values * (t_grid ** 12 + float(n) ** 12 + 1.0)))))
    return A, B


__all__ = [
    "KERNEL_THETA_SIGN",
    "KernelValue",
    "LorentzianSum",
    "PointPairTable",
    "PositivityReport",
    "PuiseuxReport",
    "QuarticRoots",
    "RoundTripResult",
    "SpectralTestFunction",
    "H_n",
    "Q_of",
    "bound_window",
    "build_phi_table",
    "calibrate_C",
    "default_roots",
    "forward_transform",
    "fourier_invert",
    "hejhal_x",
    "lorentzian_family",
    "phi_of",
    "point_pair_k",
    "point_pair_kn",
    "positivity_certificate",
    "positivity_pairs",
    "puiseux_exact",
    "puiseux_fit",
    "puiseux_halfinteger_coeffs",
    "q_recovery",
    "rho",
    "rho_X",
    "selberg_roundtrip",
    "single_term_coefficient",
    "solve_quartic_power_sums",
    "truncation_sensitivity",
    "u_of",
]
