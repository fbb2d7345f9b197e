"""L(1, chi) for nonprincipal characters.

Main route: Gauss's finite formula for psi(a/q) and

    L(1, chi) = -(1/q) sum_{a=1}^{q-1} chi(a) psi(a/q),

which holds for every nonprincipal chi (primitive or not) because the
pole terms cancel when sum_a chi(a) = 0.  The independent check is the
plain partial sum sum_{n<=M} chi(n)/n whose tail is at most q/M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import Character, CharacterGroup
from .summation import KahanAccumulator, fsum_complex

EULER_GAMMA = 0.5772156649015329
EPS = np.finfo(float).eps


class PrincipalCharacterError(ValueError):
    pass


def _log_sin_table(q: int) -> np.ndarray:
    k = np.arange(1, (q - 1) // 2 + 1)
    return np.log(np.sin(np.pi * k / q))


def _cot_pi_fraction(a, q):
    # fold to a <= q/2 so the angle stays away from pi, where tan loses digits
    a = np.asarray(a)
    sign = np.where(2 * a > q, -1.0, 1.0)
    folded = np.minimum(a, q - a)
    return sign / np.tan(np.pi * folded / q)


def digamma_rational(a: int, q: int) -> float:
    """psi(a/q) for 1 <= a <= q-1 by Gauss's digamma theorem."""
    if not 1 <= a <= q - 1:
        raise ValueError(f"digamma_rational needs 1 <= a <= q-1, got a={a}, q={q}")
    ls = _log_sin_table(q)
    k = np.arange(1, len(ls) + 1)
    trig = 2.0 * np.cos(2 * np.pi * ((k * a) % q) / q) * ls
    return math.fsum(
        [-EULER_GAMMA, -math.log(2 * q), -0.5 * math.pi * float(_cot_pi_fraction(a, q)), *trig.tolist()]
    )


@dataclass(frozen=True, eq=False)
class DigammaTable:
    """psi(a/q) for a = 1..q-1 (index 0 holds NaN)."""

    q: int
    values: np.ndarray = field(repr=False)
    log_sin: np.ndarray = field(repr=False)
    abs_error: np.ndarray = field(repr=False)

    def __getitem__(self, a: int) -> float:
        return float(self.values[a])


def digamma_table(q: int, chunk: int = 1 << 22) -> DigammaTable:
    if q < 2:
        raise ValueError("digamma_table needs q >= 2")
    ls = _log_sin_table(q)
    cos_tab = np.cos(2 * np.pi * np.arange(q) / q)
    k = np.arange(1, len(ls) + 1, dtype=np.int64)
    a_all = np.arange(1, q, dtype=np.int64)
    trig = np.zeros(q - 1)
    rows = max(1, chunk // max(len(ls), 1))
    for start in range(0, q - 1, rows):
        a = a_all[start : start + rows]
        # contiguous reduction along k: numpy uses pairwise summation here
        trig[start : start + len(a)] = (cos_tab[(a[:, None] * k[None, :]) % q] * ls).sum(axis=1)
    cot = _cot_pi_fraction(a_all, q)
    head = -EULER_GAMMA - math.log(2 * q)
    vals = np.empty(q)
    vals[0] = np.nan
    vals[1:] = head - 0.5 * np.pi * cot + 2.0 * trig
    # a priori bound: (depth of the reduction + a few ops) * eps * sum of |terms|
    mag = abs(head) + 0.5 * np.pi * np.abs(cot) + 2.0 * float(np.abs(ls).sum())
    err = np.empty(q)
    err[0] = np.nan
    err[1:] = (math.log2(max(len(ls), 2)) + 4) * EPS * mag
    return DigammaTable(q, vals, ls, err)


@dataclass(frozen=True)
class LValue:
    value: complex
    method: str  # "digamma" or "partial-sum"
    error_bound: float


def l_one(chi: Character, table: DigammaTable | None = None) -> LValue:
    if chi.is_principal:
        raise PrincipalCharacterError("L(1, chi_0) diverges")
    q = chi.q
    table = table if table is not None else digamma_table(q)
    if table.q != q:
        raise ValueError("digamma table built for a different modulus")
    vals = chi.values()
    u = chi.group.units
    u = u[u > 0]
    s = fsum_complex(vals[u] * table.values[u])
    err = (float(table.abs_error[u].sum()) + EPS * float(np.abs(table.values[u]).sum())) / q
    return LValue(-s / q, "digamma", err)


def l_values(group: CharacterGroup, table: DigammaTable | None = None) -> np.ndarray:
    """L(1, chi) for every character in lexicographic order; the principal slot is NaN."""
    q = group.q
    table = table if table is not None else digamma_table(q)
    psi = np.nan_to_num(table.values, nan=0.0)
    out = -group.transform(psi) / q
    out[0] = complex(np.nan, np.nan)
    return out


def class_partial_sums(q: int, n_max: int) -> np.ndarray:
    """h[c] = sum of 1/n over 1 <= n <= n_max with n = c (mod q), for c = 0..q-1.

    Rows n = t*q + c are added in ascending t; blocks of rows are reduced
    and then combined with a compensated accumulator.
    """
    rows_total = n_max // q + 1
    block = max(64, min(4096, (1 << 21) // q))
    offsets = np.arange(block, dtype=float)[:, None] * q + np.arange(q, dtype=float)[None, :]
    acc = KahanAccumulator(q)
    for t0 in range(0, rows_total, block):
        n = offsets + float(t0 * q)
        last = t0 + block >= rows_total
        if t0 == 0 or last:
            live = (n >= 1) & (n <= n_max)
            recip = np.divide(1.0, n, out=np.zeros_like(n), where=live)
        else:
            recip = 1.0 / n
        acc.add(recip.sum(axis=0))
    return acc.result()


@dataclass(frozen=True, eq=False)
class HarmonicClassTable:
    """H[c] = sum_{u <= q^2, u = c (mod q)} 1/u for unit c, 0 elsewhere."""

    q: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, c: int) -> float:
        return float(self.values[c % self.q])


def harmonic_class_table(q: int) -> HarmonicClassTable:
    if q < 2:
        raise ValueError("harmonic_class_table needs q >= 2")
    h = class_partial_sums(q, q * q)
    h[np.gcd(np.arange(q), q) != 1] = 0.0
    return HarmonicClassTable(q, h)


def l_one_oracle(chi: Character, m: int | None = None, sums: np.ndarray | None = None) -> LValue:
    """sum_{n<=M} chi(n)/n; the tail beyond M is at most q/M in absolute value.

    ``sums`` may carry precomputed ``class_partial_sums(q, M)`` so that every
    character of one modulus reuses a single pass over n.
    """
    if chi.is_principal:
        raise PrincipalCharacterError("L(1, chi_0) diverges")
    q = chi.q
    m = max(q * q, 10**6) if m is None else m
    if m < q * q:
        raise ValueError(f"oracle cutoff M={m} must be at least q^2={q * q}")
    h = class_partial_sums(q, m) if sums is None else sums
    value = fsum_complex(chi.values() * h)
    return LValue(value, "partial-sum", q / m)


def b_trunc(chi: Character, table: HarmonicClassTable) -> complex:
    """B(chi) = sum_{u <= q^2} chi(u)/u, assembled class by class."""
    if table.q != chi.q:
        raise ValueError(f"harmonic table modulus {table.q} != character modulus {chi.q}")
    return fsum_complex(chi.values() * table.values)
