"""2x2 unimodular matrices, the Moebius action, Iwasawa coordinates and cosets.

Iwasawa convention: g = n(x) a(y) k(theta) with

    n(x) = [[1, x], [0, 1]],  a(y) = [[sqrt y, 0], [0, 1/sqrt y]],
    k(theta) = [[cos theta, -sin theta], [sin theta, cos theta]].

For g = [[a, b], [c, d]] this gives y = 1/(c^2 + d^2), x = (ac + bd)/(c^2 + d^2) and
theta = atan2(c, d), the argument of the automorphy factor c*i + d. With bottom row
(c, d) = (b_L, a_L) the angle theta mod pi/2 equals the polar angle of the lattice
point (a_L, b_L); ``THETA_SIGN`` records that the unflipped sign is the one that
matches, as checked by :func:`verify_bijection`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._numtheory import egcd
from .errors import BijectionError, ModulusOneError
from .lattice import primitive_arrays, roots_of_arrays

THETA_SIGN = 1
TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class Mat2:
    a: float
    b: float
    c: float
    d: float

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2":
        """Inverse of a determinant-one matrix."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def is_integral(self) -> bool:
        return all(isinstance(v, (int, np.integer)) for v in (self.a, self.b, self.c, self.d))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @classmethod
    def from_array(cls, m) -> "Mat2":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])


IDENTITY = Mat2(1, 0, 0, 1)
S_MATRIX = Mat2(0, -1, 1, 0)


def translation(x) -> Mat2:
    return Mat2(1, x, 0, 1)


def dilation(y: float) -> Mat2:
    s = math.sqrt(y)
    return Mat2(s, 0.0, 0.0, 1.0 / s)


def rotation(theta: float) -> Mat2:
    c, s = math.cos(theta), math.sin(theta)
    return Mat2(c, -s, s, c)


@dataclass(frozen=True)
class IwasawaCoords:
    x: float
    y: float
    theta: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def mobius(sigma: Mat2, z: complex) -> complex:
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    return (sigma.a * z + sigma.b) / (sigma.c * z + sigma.d)


def root_pair_of_matrix(sigma: Mat2) -> tuple[int, int]:
    """(ac + bd mod c^2 + d^2, c^2 + d^2) for an integral sigma in SL2(Z)."""
    a, b, c, d = (int(v) for v in (sigma.a, sigma.b, sigma.c, sigma.d))
    if a * d - b * c != 1:
        raise ValueError("sigma must have determinant 1")
    n = c * c + d * d
    if n == 1:
        raise ModulusOneError(f"bottom row ({c}, {d}) has modulus 1")
    return (a * c + b * d) % n, n


def iwasawa(g: Mat2) -> IwasawaCoords:
    a, b, c, d = (float(v) for v in (g.a, g.b, g.c, g.d))
    r2 = c * c + d * d
    theta = (THETA_SIGN * math.atan2(c, d)) % TWO_PI
    return IwasawaCoords((a * c + b * d) / r2, 1.0 / r2, theta)


def from_iwasawa(coords: IwasawaCoords) -> Mat2:
    return translation(coords.x) @ dilation(coords.y) @ rotation(THETA_SIGN * coords.theta)


def complete_row(c: int, d: int) -> Mat2:
    """An integral determinant-one matrix with bottom row (c, d); gcd(c, d) must be 1."""
    g, x, y = egcd(d, -c)
    if g != 1:
        raise ValueError(f"bottom row ({c}, {d}) is not primitive")
    # a*d - b*c = 1 with a = x, b = y
    return Mat2(x, y, c, d)


def enumerate_cosets(q: int, c_max: int) -> list[Mat2]:
    """Representatives of Gamma_inf \\ Gamma_0(q) with 0 < c <= c_max, plus the identity.

    Rows (c, d) have q | c, 0 <= d < c and gcd(c, d) = 1; the top row (a, b) uses
    the least nonnegative a.
    """
    if q < 1 or c_max < 1:
        raise ValueError("need q >= 1 and c_max >= 1")
    reps = [IDENTITY]
    for c in range(q, c_max + 1, q):
        for d in range(c):
            if math.gcd(c, d) != 1:
                continue
            a = pow(d, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            reps.append(Mat2(a, b, c, d))
    return reps


def gamma0_coset_reps(q: int) -> list[Mat2]:
    """Representatives of Gamma_0(q) \\ SL2(Z), one per point of P^1(Z/q).

    Each class is labelled by a bottom row (c : d) up to units mod q; the lift is
    an integral matrix with that bottom row and small entries.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if q == 1:
        return [IDENTITY]
    units = [u for u in range(1, q) if math.gcd(u, q) == 1]
    seen: set[tuple[int, int]] = set()
    reps = []
    for c in range(q):
        for d in range(q):
            if math.gcd(math.gcd(c, d), q) != 1:
                continue
            orbit = {(u * c % q, u * d % q) for u in units}
            key = min(orbit)
            if key in seen:
                continue
            seen.add(key)
            reps.append(complete_row(*_primitive_lift(c, d, q)))
    return reps


def _primitive_lift(c: int, d: int, q: int) -> tuple[int, int]:
    """Integers (c', d') = (c, d) mod q with gcd(c', d') = 1, smallest first."""
    span = 4 * q + 4
    shifts = sorted(((j, k) for j in range(-span, span + 1) for k in range(-span, span + 1)),
                    key=lambda jk: (abs(jk[0]) + abs(jk[1]), -jk[0], -jk[1]))
    for j, k in shifts:
        cc, dd = c + j * q, d + k * q
        if math.gcd(cc, dd) == 1:
            return cc, dd
    raise RuntimeError(f"no primitive lift of ({c}, {d}) mod {q}")


def random_sl2z(rng: np.random.Generator, steps: int = 6, q: int = 1) -> Mat2:
    """A pseudo-random element of Gamma_0(q) as a word in T^k and a lower unipotent."""
    g = IDENTITY
    for _ in range(steps):
        k = int(rng.integers(-3, 4))
        if rng.random() < 0.5:
            g = g @ translation(k)
        else:
            g = g @ Mat2(1, 0, q * k, 1)
    if rng.random() < 0.5:
        g = -g
    return g


@dataclass
class BijectionReport:
    N: int
    checked: int
    matched: int
    prime_triples: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.checked == self.matched

    def to_json(self) -> str:
        return json.dumps(
            {"checked": self.checked, "matched": self.matched, "mismatches": self.mismatches},
            sort_keys=True,
        )


def _coset_triples(N: int) -> dict[tuple[int, int], list[float]]:
    """(root, modulus) -> angles, read off Iwasawa coordinates of all bottom rows."""
    out: dict[tuple[int, int], list[float]] = {}
    r = math.isqrt(N)
    for c in range(-r, r + 1):
        for d in range(-r, r + 1):
            n = c * c + d * d
            if n < 2 or n > N or math.gcd(c, d) != 1:
                continue
            g = complete_row(c, d)
            coords = iwasawa(g)
            modulus = round(1.0 / coords.y)
            nu, n_exact = root_pair_of_matrix(g)
            if modulus != n_exact or round(coords.x * n_exact) % n_exact != nu:
                raise BijectionError("Iwasawa coordinates disagree with the integer root", (nu, n_exact))
            angle = math.fmod(coords.theta, HALF_PI)
            angles = out.setdefault((nu, n_exact), [])
            if not any(_angle_close(angle, t) for t in angles):
                angles.append(angle)
    return out


def _angle_close(s: float, t: float, tol: float = 1e-9) -> bool:
    diff = abs(s - t) % HALF_PI
    return min(diff, HALF_PI - diff) <= tol


def verify_bijection(N: int, strict: bool = False) -> BijectionReport:
    """Compare coset-derived triples with lattice-derived triples for moduli <= N."""
    if N < 2:
        raise ValueError("verify_bijection needs N >= 2")
    from ._numtheory import prime_sieve

    cosets = _coset_triples(N)
    a, b, n, angle = primitive_arrays(N, radius_sq_min=2)
    nu = roots_of_arrays(a, b, n)
    lattice = {(int(v), int(m)): float(t) for v, m, t in zip(nu, n, angle)}

    mismatches = []
    matched = 0
    for key in sorted(set(cosets) | set(lattice)):
        coset_angles = cosets.get(key, [])
        lattice_angle = lattice.get(key)
        if lattice_angle is None or len(coset_angles) != 1 or not _angle_close(coset_angles[0], lattice_angle):
            mismatches.append({"nu": key[0], "n": key[1], "coset_angles": coset_angles,
                               "lattice_angle": lattice_angle})
        else:
            matched += 1
    primes = prime_sieve(N)
    report = BijectionReport(
        N=N,
        checked=len(set(cosets) | set(lattice)),
        matched=matched,
        prime_triples=sum(1 for (_, m) in lattice if primes[m]),
        mismatches=mismatches,
    )
    if strict and mismatches:
        raise BijectionError(f"{len(mismatches)} mismatched triples", mismatches[0])
    return report


__all__ = [
    "BijectionReport",
    "IDENTITY",
    "IwasawaCoords",
    "Mat2",
    "S_MATRIX",
    "THETA_SIGN",
    "complete_row",
    "dilation",
    "enumerate_cosets",
    "from_iwasawa",
    "gamma0_coset_reps",
    "iwasawa",
    "mobius",
    "random_sl2z",
    "root_pair_of_matrix",
    "rotation",
    "translation",
    "verify_bijection",
]
