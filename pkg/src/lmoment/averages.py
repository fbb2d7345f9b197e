"""S(q, N), its truncated proxy, and the congruence-side terms M1, M2.

Writing A(chi) = sum_{m<=N} chi(m) and B(chi) = sum_{u<=q^2} chi(u)/u, row
orthogonality gives the exact identity

    sum_{all chi} |A(chi)|^2 |B(chi)|^2 = phi(q) * sum_r D[r]^2 = M1 + M2,

where D[r] = sum over m <= N, u <= q^2 with mu = r (mod q) of 1/u and all
of m, u coprime to q.  M1 collects the pairs with mu = nv, M2 the rest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import arith
from .arith import DomainError, GuardError
from .characters import CharacterGroup, build_group, enumerate_nonprincipal, incomplete_sum, incomplete_sums
from .constants import DEFAULT_TRUNC, Estimate, alpha
from .lvalues import (
    DigammaTable,
    HarmonicClassTable,
    b_trunc,
    digamma_table,
    harmonic_class_table,
    l_one,
    l_values,
)
from .summation import KahanAccumulator, fsum_array

__all__ = [
    "HarmonicClassTable",
    "MomentBreakdown",
    "ModulusData",
    "breakdown",
    "congruence_total",
    "harmonic_class_table",
    "identity_check",
    "identity_sides",
    "m1",
    "m2",
    "ratio",
    "residue_profile",
    "s_direct",
    "s_proxy",
]

IDENTITY_MAX_Q = 200
IDENTITY_MAX_N = 50
CLAMP_REL = 1e-9
_ZETA2 = math.pi**2 / 6
_SMALL = 64
_INV_SQ_PREFIX = np.array([math.fsum(1.0 / (s * s) for s in range(1, x + 1)) for x in range(_SMALL)])


def _warn_range(q: int, n: int) -> None:
    if n >= q:
        warnings.warn(f"N={n} >= q={q}: outside the range q > N of the asymptotic formula", RuntimeWarning, stacklevel=3)


def inverse_square_prefix(x: np.ndarray) -> np.ndarray:
    """sum_{s <= x} 1/s^2, elementwise; exact table below 64, Euler-Maclaurin above."""
    x = np.asarray(x, dtype=np.int64)
    out = np.empty(x.shape)
    small = x < _SMALL
    out[small] = _INV_SQ_PREFIX[x[small]]
    a = x[~small].astype(float) + 1.0
    # tail sum_{s >= a} 1/s^2; the next correction is below 1e-20 for a >= 64
    ia = 1.0 / a
    ia2 = ia * ia
    tail = ia * (1.0 + ia * (0.5 + ia * (1.0 / 6.0 + ia2 * (-1.0 / 30.0 + ia2 * (1.0 / 42.0 - ia2 / 30.0)))))
    out[~small] = _ZETA2 - tail
    return out


def coprime_inverse_square_sum(limit: np.ndarray, f) -> np.ndarray:
    """sum_{t <= limit, gcd(t, q) = 1} 1/t^2 by Mobius inversion over rad(q)."""
    limit = np.asarray(limit, dtype=np.int64)
    out = np.zeros(limit.shape)
    for d, mu in arith.squarefree_divisors(f):
        out += (mu / (d * d)) * inverse_square_prefix(limit // d)
    return out


def _units_upto(q: int, n: int) -> np.ndarray:
    m = np.arange(1, n + 1, dtype=np.int64)
    return m[np.gcd(m, q) == 1]


def m1(q: int, n: int) -> float:
    """phi(q) * sum over m, n <= N and u, v <= q^2 with mu = nv of 1/(uv),
    everything coprime to q.

    With g = gcd(m, n) the solutions are u = (n/g) t, v = (m/g) t, so each
    pair contributes (g^2/(mn)) * sum_{t <= q^2 g / max(m, n), (t, q) = 1} 1/t^2.
    """
    f = arith.factorize(q)
    ms = _units_upto(q, n)
    if len(ms) == 0:
        return 0.0
    mm, nn = np.meshgrid(ms, ms, indexing="ij")
    g = np.gcd(mm, nn)
    limit = (q * q * g) // np.maximum(mm, nn)
    weight = (g * g) / (mm.astype(float) * nn.astype(float))
    terms = weight * coprime_inverse_square_sum(limit, f)
    return arith.euler_phi(f) * fsum_array(terms)


def residue_profile(q: int, n: int, table: HarmonicClassTable) -> np.ndarray:
    """D[r] = sum_{m <= N, (m, q) = 1} H[m^{-1} r mod q]."""
    if table.q != q:
        raise ValueError("harmonic table built for a different modulus")
    r = np.arange(q, dtype=np.int64)
    acc = KahanAccumulator(q)
    for m in _units_upto(q, n):
        acc.add(table.values[(pow(int(m), -1, q) * r) % q])
    return acc.result()


def congruence_total(q: int, n: int, table: HarmonicClassTable) -> float:
    """phi(q) * sum_r D[r]^2, which equals M1 + M2."""
    d = residue_profile(q, n, table)
    return arith.euler_phi(q) * fsum_array(d * d)


def m2(q: int, n: int, table: HarmonicClassTable | None = None, m1_value: float | None = None) -> float:
    table = table if table is not None else harmonic_class_table(q)
    total = congruence_total(q, n, table)
    first = m1(q, n) if m1_value is None else m1_value
    out = total - first
    if out < 0:
        if -out > CLAMP_REL * total:
            raise ArithmeticError(f"M2 = {out} is negative beyond rounding (total {total})")
        out = 0.0
    return out


def s_direct(q: int, n: int, digamma: DigammaTable | None = None, pointwise: bool = False) -> float:
    """sum over nonprincipal chi of |sum_{m<=N} chi(m)|^2 |L(1, chi)|^2.

    The default evaluates every character at once through the group
    transform; ``pointwise`` walks the characters one by one instead.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    _warn_range(q, n)
    group = build_group(q)
    if group.phi == 1:
        return 0.0
    table = digamma if digamma is not None else digamma_table(q)
    if pointwise:
        terms = [abs(incomplete_sum(chi, n)) ** 2 * abs(l_one(chi, table).value) ** 2 for chi in enumerate_nonprincipal(group)]
        return math.fsum(terms)
    a = incomplete_sums(group, n)
    lv = l_values(group, table)
    return fsum_array((np.abs(a[1:]) ** 2) * (np.abs(lv[1:]) ** 2))


def s_proxy(q: int, n: int, table: HarmonicClassTable | None = None, pointwise: bool = False) -> tuple[float, float]:
    """(sum over chi != chi_0 of |A|^2 |B|^2, the chi_0 term)."""
    if q < 2:
        raise ValueError("q must be >= 2")
    _warn_range(q, n)
    table = table if table is not None else harmonic_class_table(q)
    group = build_group(q)
    if pointwise:
        terms = [abs(incomplete_sum(chi, n)) ** 2 * abs(b_trunc(chi, table)) ** 2 for chi in group]
        return math.fsum(terms[1:]), terms[0]
    a2 = np.abs(incomplete_sums(group, n)) ** 2
    b2 = np.abs(group.transform(table.values)) ** 2
    return fsum_array(a2[1:] * b2[1:]), float(a2[0] * b2[0])


def identity_sides(q: int, n: int) -> tuple[float, float]:
    """(S_proxy + principal term, M1 + M2) for the exhaustive regime."""
    if not (2 <= q <= IDENTITY_MAX_Q and 1 <= n <= IDENTITY_MAX_N):
        raise GuardError(f"identity_check limited to q <= {IDENTITY_MAX_Q}, N <= {IDENTITY_MAX_N}")
    table = harmonic_class_table(q)
    proxy, principal = s_proxy(q, n, table, pointwise=True)
    first = m1(q, n)
    return proxy + principal, first + m2(q, n, table, first)


def identity_check(q: int, n: int) -> float:
    """Relative gap between the character side and the congruence side."""
    lhs, rhs = identity_sides(q, n)
    return abs(lhs - rhs) / rhs


def ratio(q: int, n: int, t: int = DEFAULT_TRUNC) -> float:
    if not q > n >= 1:
        raise DomainError(f"ratio needs q > N >= 1 (got q={q}, N={n})")
    if arith.euler_phi(q) <= 1:
        raise DomainError(f"no nonprincipal characters modulo {q}")
    return s_direct(q, n) / (alpha(q, t).value * q * n)


class ModulusData:
    """Tables shared by every N for one modulus; immutable once built."""

    def __init__(self, q: int, trunc: int = DEFAULT_TRUNC):
        if q < 2:
            raise ValueError("q must be >= 2")
        self.q = q
        self.trunc = trunc

    @cached_property
    def group(self) -> CharacterGroup:
        return build_group(self.q)

    @cached_property
    def digamma(self) -> DigammaTable:
        return digamma_table(self.q)

    @cached_property
    def harmonic(self) -> HarmonicClassTable:
        return harmonic_class_table(self.q)

    @cached_property
    def l_abs2(self) -> np.ndarray:
        out = np.abs(l_values(self.group, self.digamma)) ** 2
        out[0] = 0.0
        return out

    @cached_property
    def b_abs2(self) -> np.ndarray:
        return np.abs(self.group.transform(self.harmonic.values)) ** 2

    @cached_property
    def alpha(self) -> Estimate:
        return alpha(self.q, self.trunc)

    def warm(self) -> "ModulusData":
        for name in ("group", "digamma", "harmonic", "l_abs2", "b_abs2", "alpha"):
            getattr(self, name)
        return self


@dataclass(frozen=True)
class MomentBreakdown:
    q: int
    n: int
    s_direct: float
    s_proxy: float
    m1: float
    m2: float
    principal_term: float
    alpha: float
    alpha_error: float
    ratio: float | None


def breakdown(data: ModulusData, n: int) -> MomentBreakdown:
    q = data.q
    if n < 1:
        raise ValueError("N must be >= 1")
    a2 = np.abs(incomplete_sums(data.group, n)) ** 2
    direct = fsum_array(a2[1:] * data.l_abs2[1:])
    proxy = fsum_array(a2[1:] * data.b_abs2[1:])
    principal = float(a2[0] * data.b_abs2[0])
    first = m1(q, n)
    second = m2(q, n, data.harmonic, first)
    al = data.alpha
    r = direct / (al.value * q * n) if q > n and data.group.phi > 1 else None
    return MomentBreakdown(q, n, direct, proxy, first, second, principal, al.value, al.error, r)
