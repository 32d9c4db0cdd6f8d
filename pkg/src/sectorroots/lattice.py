"""Primitive lattice points, the roots of X^2 + 1 they carry, and the sequences Y.

A primitive point (a, b) with n = a^2 + b^2 > 1 yields the root nu = a^{-1} b (mod n)
of X^2 + 1 = 0 (mod n), together with its polar angle arctan(b / a). Every root of
every modulus arises exactly once this way, so the module never needs a modular
square-root algorithm.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from ._numtheory import is_prime, modinv_array, prime_sieve
from .errors import ModulusOneError

__all__ = [
    "FULL_SECTOR",
    "LatticePoint",
    "RootTriple",
    "SectorWindow",
    "count_primes_1mod4",
    "count_sector_points",
    "count_sector_primes",
    "enumerate_primitive",
    "is_prime",
    "points_of_norm",
    "primitive_arrays",
    "root_of",
    "sequence_Y",
    "sequence_Y_arrays",
    "write_points_csv",
]

HALF_PI = 0.5 * math.pi
POINTS_SCHEMA = "# schema: sectorroots.points/1"


@dataclass(frozen=True)
class LatticePoint:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"lattice point must lie in the first quadrant: {self}")
        if math.gcd(self.a, self.b) != 1:
            raise ValueError(f"lattice point is not primitive: {self}")

    @property
    def n(self) -> int:
        return self.a * self.a + self.b * self.b

    @property
    def angle(self) -> float:
        return math.atan2(self.b, self.a)


@dataclass(frozen=True)
class RootTriple:
    nu: int
    n: int
    angle: float
    degenerate: bool = False

    @property
    def normalized(self) -> float:
        return self.nu / self.n


@dataclass(frozen=True)
class SectorWindow:
    """Angular window [alpha, beta] inside [0, pi/2] with smoothing width Z.

    Z = 0 describes a sharp window; smooth cutoffs require Z > 0.
    """

    alpha: float = 0.0
    beta: float = HALF_PI
    Z: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.alpha < self.beta <= HALF_PI + 1e-15):
            raise ValueError(f"need 0 <= alpha < beta <= pi/2, got [{self.alpha}, {self.beta}]")
        if not (0.0 <= self.Z < 0.5 * (self.beta - self.alpha)):
            raise ValueError(f"need 0 <= Z < (beta - alpha)/2, got Z={self.Z}")

    def contains(self, angle):
        angle = np.asarray(angle, dtype=float)
        return (angle >= self.alpha) & (angle <= self.beta)


FULL_SECTOR = SectorWindow(0.0, HALF_PI)


def primitive_arrays(radius_sq_max: int, sector: SectorWindow | None = None,
                     radius_sq_min: int = 0):
    """Arrays (a, b, n, angle) of primitive first-quadrant points, sorted by (n, angle).

    Only points with radius_sq_min <= a^2 + b^2 <= radius_sq_max are kept.
    """
    r = math.isqrt(max(int(radius_sq_max), 0))
    side = np.arange(r + 1, dtype=np.int64)
    a, b = np.meshgrid(side, side, indexing="ij")
    a, b = a.ravel(), b.ravel()
    n = a * a + b * b
    keep = (n >= max(radius_sq_min, 1)) & (n <= radius_sq_max) & (np.gcd(a, b) == 1)
    a, b, n = a[keep], b[keep], n[keep]
    angle = np.arctan2(b, a)
    if sector is not None:
        inside = sector.contains(angle)
        a, b, n, angle = a[inside], b[inside], n[inside], angle[inside]
    order = np.lexsort((angle, n))
    return a[order], b[order], n[order], angle[order]


def roots_of_arrays(a, b, n) -> np.ndarray:
    """nu = a^{-1} b mod n elementwise; 0 where n == 1."""
    return np.mod(modinv_array(a, n) * np.asarray(b, dtype=np.int64), n)


def points_of_norm(n: int) -> list[LatticePoint]:
    """Primitive first-quadrant points with a^2 + b^2 = n, by increasing angle."""
    out = []
    for a in range(math.isqrt(n), -1, -1):
        b = math.isqrt(n - a * a)
        if b * b == n - a * a and math.gcd(a, b) == 1:
            out.append(LatticePoint(a, b))
    return out


def enumerate_primitive(radius_sq_max: int, sector: SectorWindow | None = None) -> list[LatticePoint]:
    a, b, _, _ = primitive_arrays(radius_sq_max, sector)
    return [LatticePoint(int(x), int(y)) for x, y in zip(a, b)]


def root_of(p: LatticePoint | tuple[int, int], strict: bool = False) -> RootTriple:
    """The root a^{-1} b mod (a^2 + b^2) attached to a primitive point.

    Modulus one has no root: the triple comes back with nu = 0 and ``degenerate``
    set, or ModulusOneError is raised when ``strict``.
    """
    if not isinstance(p, LatticePoint):
        p = LatticePoint(*p)
    n = p.n
    if n == 1:
        if strict:
            raise ModulusOneError(f"{p} has modulus 1")
        return RootTriple(0, 1, p.angle, degenerate=True)
    nu = pow(p.a, -1, n) * p.b % n
    return RootTriple(nu, n, p.angle)


def sequence_Y_arrays(N: int, sector: SectorWindow | None = None):
    """Arrays (nu, n, angle) of the prime-modulus sequence, ordered by (n, nu/n)."""
    if N < 2:
        raise ValueError("sequence_Y needs N >= 2")
    a, b, n, angle = primitive_arrays(N, sector, radius_sq_min=2)
    prime = prime_sieve(N)[n]
    a, b, n, angle = a[prime], b[prime], n[prime], angle[prime]
    nu = roots_of_arrays(a, b, n)
    # nu/n order within a fixed modulus is just nu order
    order = np.lexsort((nu, n))
    return nu[order], n[order], angle[order]


def sequence_Y(N: int, sector: SectorWindow | None = None) -> list[RootTriple]:
    nu, n, angle = sequence_Y_arrays(N, sector)
    return [RootTriple(int(v), int(m), float(t)) for v, m, t in zip(nu, n, angle)]


def count_primes_1mod4(N: int) -> int:
    """#{p <= N prime : p = 2 or p = 1 mod 4}."""
    flags = prime_sieve(N)
    p = np.flatnonzero(flags)
    return int(np.count_nonzero((p == 2) | (p % 4 == 1)))


def count_sector_primes(N: int, sector: SectorWindow) -> int:
    """Number of primes p <= N with at least one point a^2 + b^2 = p in the sector."""
    _, n, _ = sequence_Y_arrays(N, sector)
    return int(np.unique(n).size)


def count_sector_points(N: int, sector: SectorWindow) -> int:
    """Number of prime lattice points (equivalently prime-modulus roots) in the sector."""
    _, n, _ = sequence_Y_arrays(N, sector)
    return int(n.size)


def write_points_csv(points: Iterable[LatticePoint], out: TextIO | None = None) -> str:
    """Write ``a,b,n,nu,angle_radians`` rows; returns the text when ``out`` is None."""
    buf = out if out is not None else io.StringIO()
    buf.write(POINTS_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["a", "b", "n", "nu", "angle_radians"])
    for p in points:
        t = root_of(p)
        writer.writerow([p.a, p.b, t.n, t.nu, f"{t.angle:.12g}"])
    return buf.getvalue() if out is None else ""
