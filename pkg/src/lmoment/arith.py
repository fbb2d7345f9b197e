"""Exact integer arithmetic: factorisation, multiplicative functions,
divisor counting and the CRT structure of (Z/qZ)*."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

MAX_N = 2**63 - 1
TRIAL_LIMIT = 10**6

# Deterministic for every n < 3.3e24, which covers the 63-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class GuardError(ValueError):
    """Request exceeds the size limit of an exhaustive computation."""


def _small_primes(limit: int) -> list[int]:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


_PRIMES = _small_primes(TRIAL_LIMIT)


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition, primes ascending.  ``1`` has no pairs."""

    pairs: tuple[tuple[int, int], ...] = ()

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.pairs]

    def radical(self) -> int:
        return math.prod(self.primes)

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.pairs]


def _as_factorization(f) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(int(f))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2**64."""
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
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's variant; deterministic sequence of constants c = 1, 2, ...
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"pollard rho failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> Factorization:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"factorize: n={n} outside [1, 2**63-1]")
    found: dict[int, int] = {}
    for p in _PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    if n > 1:
        _split(n, found)
    return Factorization(tuple(sorted(found.items())))


def euler_phi(f) -> int:
    f = _as_factorization(f)
    out = 1
    for p, e in f.pairs:
        out *= p ** (e - 1) * (p - 1)
    return out


def omega(f) -> int:
    return len(_as_factorization(f).pairs)


def tau(f) -> int:
    return math.prod(e + 1 for _, e in _as_factorization(f).pairs)


def squarefree_divisors(f) -> list[tuple[int, int]]:
    """(d, mu(d)) for every divisor d of rad(n), in ascending d."""
    primes = _as_factorization(f).primes
    out = []
    for mask in product((0, 1), repeat=len(primes)):
        d = math.prod(p for p, b in zip(primes, mask) if b)
        out.append((d, -1 if sum(mask) % 2 else 1))
    return sorted(out)


def divisor_pairs_in_box(s: int, n_max: int, v_lo: int, v_hi: int) -> int:
    """Number of (n, v) with n*v = s, 1 <= n <= n_max and v_lo <= v < v_hi."""
    count = 0
    for d in range(1, math.isqrt(s) + 1):
        if s % d:
            continue
        e = s // d
        if d <= n_max and v_lo <= e < v_hi:
            count += 1
        if e != d and e <= n_max and v_lo <= d < v_hi:
            count += 1
    return count


def divisor_pairs_table(s_max: int, n_max: int, v_lo: int, v_hi: int) -> np.ndarray:
    """``divisor_pairs_in_box(s, ...)`` for every 0 <= s <= s_max at once.

    Each admissible pair (n, v) is marked at its product, which is the same
    count organised by pairs instead of by divisors of s.
    """
    table = np.zeros(s_max + 1, dtype=np.int64)
    v = np.arange(max(v_lo, 1), v_hi, dtype=np.int64)
    for n in range(1, n_max + 1):
        s = n * v
        s = s[s <= s_max]
        table[s] += 1  # products n*v are distinct for fixed n
    return table


def mod_inverse(a: int, q: int) -> int:
    if math.gcd(a, q) != 1:
        raise DomainError(f"{a} is not invertible modulo {q}")
    return pow(a, -1, q) if q > 1 else 0


def primitive_root(p: int, e: int = 1) -> int:
    """Smallest generator of (Z/p^e Z)* for an odd prime p."""
    if p == 2:
        raise DomainError("no primitive root modulo 2^e for e >= 3; use crt_unit_group")
    mod = p**e
    phi = p ** (e - 1) * (p - 1)
    ells = factorize(phi).primes
    for g in range(2, mod):
        if g % p == 0:
            continue
        if all(pow(g, phi // ell, mod) != 1 for ell in ells):
            return g
    raise RuntimeError(f"no primitive root found mod {mod}")


def local_unit_components(p: int, e: int) -> list[tuple[int, int]]:
    """Generators of (Z/p^e Z)* as residues mod p^e, with their orders."""
    if p != 2:
        return [(primitive_root(p, e), p ** (e - 1) * (p - 1))]
    if e == 1:
        return []
    if e == 2:
        return [(3, 2)]
    return [(2**e - 1, 2), (5, 2 ** (e - 2))]


def crt_lift(residue: int, modulus: int, q: int) -> int:
    """The x mod q with x = residue (mod modulus) and x = 1 (mod q/modulus)."""
    other = q // modulus
    if other == 1:
        return residue % q
    return (residue * other * pow(other, -1, modulus) + modulus * pow(modulus, -1, other)) % q


def crt_unit_group(f) -> list[tuple[int, int]]:
    """(generator lifted to Z/qZ, order) for each cyclic factor of (Z/qZ)*."""
    f = _as_factorization(f)
    q = f.n
    if q < 2:
        raise ValueError("crt_unit_group needs q >= 2")
    out = []
    for p, e in f.pairs:
        for g, order in local_unit_components(p, e):
            out.append((crt_lift(g, p**e, q), order))
    return out
