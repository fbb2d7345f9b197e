"""The leading constant alpha_q = (beta_q + gamma_q) * phi(q)^2 / q^2.

gamma_q contains the series sum 1/(nm(n+m)) over m, n >= 1 with
gcd(nm(n+m), q) = 1.  It is truncated to the simplex m + n <= T.  The
discarded part is at most the unrestricted tail

    sum_{s > T} 2 H_{s-1} / s^2 <= 2 (ln T + 1 + gamma_E) / T,

using H_{s-1} < ln s + gamma_E and the integral test on the decreasing
function (ln x + gamma_E) / x^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from . import arith
from .lvalues import EULER_GAMMA

ZETA3 = 1.2020569031595942853997381615114
DEFAULT_TRUNC = 10**5


class Estimate(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class TruncatedSeriesValue:
    partial_sum: float
    cutoff: int
    tail_bound: float


def zeta3() -> float:
    return ZETA3


def beta(f) -> float:
    f = arith._as_factorization(f)
    out = math.pi**2 / 6
    for p in f.primes:
        out *= 1.0 - 1.0 / (p * p)
    return out


def series_tail_bound(t: int) -> float:
    return 2.0 * (math.log(t) + 1.0 + EULER_GAMMA) / t


def _class_prefix(t: int, d: int) -> np.ndarray:
    """P[x] = sum of 1/m over 1 <= m <= x with m = x (mod d); P[0] = 0."""
    rows = t // d + 1
    recip = np.zeros(rows * d)
    recip[1 : t + 1] = 1.0 / np.arange(1, t + 1)
    return np.cumsum(recip.reshape(rows, d), axis=0).ravel()[: t + 1]


def _sum_by_classes(r_primes: list[int], t: int) -> float:
    s = np.arange(2, t + 1, dtype=np.int64)
    r = math.prod(r_primes)
    s = s[np.gcd(s, r) == 1]
    inner = np.zeros(len(s))
    prefixes: dict[int, np.ndarray] = {}
    # for p not dividing s, [p | m] and [p | s-m] are disjoint, so the
    # indicator of gcd(m(s-m), p) = 1 is 1 - [m = 0 (p)] - [m = s (p)]
    for choice in product((None, "zero", "s"), repeat=len(r_primes)):
        d0 = math.prod(p for p, c in zip(r_primes, choice) if c == "zero")
        ds = math.prod(p for p, c in zip(r_primes, choice) if c == "s")
        d = d0 * ds
        sign = -1.0 if sum(c is not None for c in choice) % 2 else 1.0
        # e = 0 (mod d0), e = 1 (mod ds): the class of m is s*e mod d
        e = d0 * pow(d0, -1, ds) % d if ds > 1 else 0
        c = (s * e) % d
        x = (s - 1) - ((s - 1 - c) % d)
        if d not in prefixes:
            prefixes[d] = _class_prefix(t, d)
        inner += sign * np.where(x >= 1, prefixes[d][np.maximum(x, 0)], 0.0)
    terms = 2.0 * inner / (s.astype(float) ** 2)
    return math.fsum(terms.tolist())


def _sum_direct(r: int, t: int, half: bool = False) -> float:
    rows = []
    for s in range(2, t + 1):
        if math.gcd(s, r) != 1:
            continue
        m = np.arange(1, s // 2 + 1 if half else s, dtype=np.int64)
        n = s - m
        ok = (np.gcd(m, r) == 1) & (np.gcd(n, r) == 1)
        w = np.where(ok, 1.0 / (m.astype(float) * n.astype(float) * s), 0.0)
        if half:
            w = np.where(m < n, 2.0 * w, w)
        rows.append(float(w.sum()))
    return math.fsum(rows)


def gamma_double_sum(
    q: int, t: int = DEFAULT_TRUNC, restricted: bool = True, method: str = "classes"
) -> TruncatedSeriesValue:
    """Sum of 1/(nm(n+m)) over m + n <= T with gcd(nm(n+m), q) = 1.

    ``restricted=False`` drops the gcd condition; that series equals
    2*zeta(3) and corresponds to no modulus, it exists for testing.
    ``method`` is "classes" (fast regrouping), "direct" or "direct-half"
    (symmetric half loop); the direct loops are quadratic in T.
    """
    if t < 2:
        raise ValueError("cutoff T must be >= 2")
    primes = arith.factorize(q).primes if restricted else []
    if 2 in primes:
        # one of m, n, m+n is always even
        return TruncatedSeriesValue(0.0, t, 0.0)
    if method == "classes":
        total = _sum_by_classes(primes, t)
    elif method in ("direct", "direct-half"):
        total = _sum_direct(math.prod(primes), t, half=method == "direct-half")
    else:
        raise ValueError(f"unknown method {method!r}")
    return TruncatedSeriesValue(total, t, series_tail_bound(t))


def gamma_prefactor(f) -> float:
    f = arith._as_factorization(f)
    out = math.pi**2 / (3.0 * ZETA3)
    for p in f.primes:
        out *= 1.0 - 1.0 / (p * p + p + 1)
    return out


def gamma(f, t: int = DEFAULT_TRUNC) -> Estimate:
    f = arith._as_factorization(f)
    if f.n < 2:
        raise ValueError("gamma_q needs q >= 2")
    series = gamma_double_sum(f.n, t)
    pre = gamma_prefactor(f)
    return Estimate(pre * series.partial_sum, pre * series.tail_bound)


def alpha(f, t: int = DEFAULT_TRUNC) -> Estimate:
    f = arith._as_factorization(f)
    q = f.n
    if q < 2:
        raise ValueError("alpha_q needs q >= 2")
    g = gamma(f, t)
    scale = (arith.euler_phi(f) / q) ** 2
    return Estimate((beta(f) + g.value) * scale, g.error * scale)
