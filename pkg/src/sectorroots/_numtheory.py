"""Small integer helpers shared by the lattice, modular and specfun modules."""

from __future__ import annotations

import math

import numpy as np

# Deterministic Miller-Rabin witnesses for every n < 3.3e24 (covers 64-bit).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 2**64 (and far beyond)."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_sieve(n: int) -> np.ndarray:
    """Boolean array ``flags`` of length n+1 with ``flags[k]`` true iff k is prime."""
    flags = np.ones(max(n + 1, 2), dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags[: n + 1]


def modinv_array(a, m) -> np.ndarray:
    """Elementwise inverse of ``a`` modulo ``m`` (int64 arrays, gcd assumed 1).

    Returns 0 where m == 1.
    """
    a = np.asarray(a, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    a, m = np.broadcast_arrays(a, m)
    r0 = m.copy()
    r1 = np.mod(a, m)
    s0 = np.zeros_like(m)
    s1 = np.ones_like(m)
    active = r1 != 0
    while active.any():
        q = np.zeros_like(m)
        q[active] = r0[active] // r1[active]
        r0, r1 = np.where(active, r1, r0), np.where(active, r0 - q * r1, r1)
        s0, s1 = np.where(active, s1, s0), np.where(active, s0 - q * s1, s1)
        active = r1 != 0
    return np.mod(s0, m)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def divisor_count(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("divisor_count needs n >= 1")
    count = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        count *= e + 1
        p += 1 if p == 2 else 2
    if n > 1:
        count *= 2
    return count


def euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def unit_circle_phase(num, den):
    """e(num/den) for integer arrays, reducing num mod den before scaling by 2*pi."""
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    frac = np.mod(num, den) / den
    return np.exp(2j * np.pi * frac)
